#include <doctest.h>

#include <algorithm>
#include <random>

#include "sgb/distance.hpp"
#include "sgb/oracle.hpp"
#include "test_support.hpp"

using namespace sgb;
using namespace sgb::oracle;
namespace ts = sgb::testsupport;

namespace {

std::vector<std::pair<TupleId, TupleId>> edges_of(const SimilarityGraph& g) {
    std::vector<std::pair<TupleId, TupleId>> out;
    for (std::size_t i = 0; i < g.vertex_count(); ++i)
        for (std::size_t j = i + 1; j < g.vertex_count(); ++j)
            if (g.adj[i][j]) out.emplace_back(g.ids[i], g.ids[j]);
    return out;
}

std::vector<std::vector<TupleId>> sorted(std::vector<std::vector<TupleId>> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("build_graph: fixture F edge set") {
    const auto g = build_graph(ts::fixture_f(), ts::fixture_f_spec());
    const std::vector<std::pair<TupleId, TupleId>> want{
        {0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {3, 5}, {4, 5}, {6, 7}};
    CHECK(edges_of(g) == want);

    // eps below the smallest pairwise distance: no edges
    const auto sparse = build_graph(ts::fixture_f(), {Metric::L2, 1.0});
    CHECK(edges_of(sparse).empty());

    // identical points: complete graph
    const auto complete =
        build_graph(make_dataset({{1, 1}, {1, 1}, {1, 1}}), {Metric::L2, 0.5});
    CHECK(edges_of(complete).size() == 3);
}

TEST_CASE("maximal_cliques") {
    CHECK(sorted(maximal_cliques(
              build_graph(ts::fixture_f(), ts::fixture_f_spec()))) ==
          ts::fixture_f_duplicate_groups());

    const auto singles =
        maximal_cliques(build_graph(make_dataset({{0, 0}, {5, 0}, {10, 0}}),
                                    {Metric::L2, 1.0}));
    CHECK(sorted(singles) ==
          std::vector<std::vector<TupleId>>{{0}, {1}, {2}});

    const auto k4 = maximal_cliques(build_graph(
        make_dataset({{0, 0}, {1, 0}, {0, 1}, {1, 1}}), {Metric::L2, 2.0}));
    CHECK(sorted(k4) == std::vector<std::vector<TupleId>>{{0, 1, 2, 3}});
}

TEST_CASE("maximal_cliques output is a cover of maximal cliques") {
    std::mt19937_64 gen(43);
    for (int trial = 0; trial < 150; ++trial) {
        const Dataset ds =
            ts::random_dataset(gen, 2 + rng::uniform_index(gen, 8), 2, 8.0);
        const SimilaritySpec spec = ts::random_spec(gen);
        const auto g = build_graph(ds, spec);
        const auto cliques = maximal_cliques(g);

        std::vector<bool> covered(ds.size(), false);
        auto adj = [&](TupleId a, TupleId b) { return g.adj[a][b]; };
        for (const auto& c : cliques) {
            for (std::size_t i = 0; i < c.size(); ++i) {
                covered[c[i]] = true;
                for (std::size_t j = i + 1; j < c.size(); ++j)
                    REQUIRE(adj(c[i], c[j]));
            }
            // maximality: no outside vertex adjacent to the whole clique
            for (TupleId v = 0; v < ds.size(); ++v) {
                if (std::binary_search(c.begin(), c.end(), v)) continue;
                bool all = true;
                for (TupleId m : c)
                    if (!adj(v, m)) {
                        all = false;
                        break;
                    }
                REQUIRE_FALSE(all);
            }
        }
        for (bool b : covered) CHECK(b);
        for (std::size_t i = 0; i < cliques.size(); ++i)
            for (std::size_t j = 0; j < cliques.size(); ++j)
                if (i != j)
                    REQUIRE_FALSE(std::includes(cliques[j].begin(),
                                                cliques[j].end(),
                                                cliques[i].begin(),
                                                cliques[i].end()));
    }
}

TEST_CASE("oracle policies on fixture F") {
    const Dataset ds = ts::fixture_f();
    const SimilaritySpec spec = ts::fixture_f_spec();

    const GroupSet dup = oracle_duplicate(ds, spec);
    CHECK(dup.groups == ts::fixture_f_duplicate_groups());
    CHECK(dup.oset == std::vector<TupleId>{2, 3});

    const GroupSet elim = oracle_eliminate(ds, spec);
    CHECK(elim.groups == ts::fixture_f_eliminate_groups());
    CHECK(elim.oset.empty());

    const GroupSet ng = oracle_new_group(ds, spec);
    CHECK(ng.groups == ts::fixture_f_new_group_groups());
    CHECK(ng.oset.empty());
}

TEST_CASE("oracle policies agree on overlap-free input") {
    const Dataset ds = make_dataset({{0, 0}, {1, 0}, {20, 0}, {21, 0}});
    const SimilaritySpec spec{Metric::L2, 2.0};
    const auto dup = oracle_duplicate(ds, spec);
    const auto elim = oracle_eliminate(ds, spec);
    const auto ng = oracle_new_group(ds, spec);
    CHECK(dup.groups == elim.groups);
    CHECK(dup.groups == ng.groups);
    CHECK(dup.oset.empty());
}

TEST_CASE("oracle on a single tuple and the empty dataset") {
    for (const Policy p :
         {Policy::Duplicate, Policy::Eliminate, Policy::NewGroup}) {
        const auto single = oracle_run(make_dataset({{2, 2}}), {Metric::L2, 1.0}, p);
        CHECK(single.groups == std::vector<std::vector<TupleId>>{{0}});
        const auto empty = oracle_run(make_dataset({}), {Metric::L2, 1.0}, p);
        CHECK(empty.groups.empty());
    }
}

TEST_CASE("new-group regroups overlap tuples round by round") {
    // unit square at eps=1 (L2): a 4-cycle, every vertex overlapped; no
    // round can shrink it, so new-group drops the lot like eliminate
    const Dataset square = make_dataset({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    const SimilaritySpec spec{Metric::L2, 1.0};
    const auto dup = oracle_duplicate(square, spec);
    CHECK(dup.groups.size() == 4);
    CHECK(dup.oset == std::vector<TupleId>{0, 1, 2, 3});
    CHECK(oracle_eliminate(square, spec).groups.empty());
    CHECK(oracle_new_group(square, spec).groups.empty());
}

TEST_CASE("permutation_check passes for the engine on fixture F") {
    for (const Policy p :
         {Policy::Duplicate, Policy::Eliminate, Policy::NewGroup}) {
        const auto verdict =
            permutation_check(ts::fixture_f(), ts::fixture_f_spec(), p, 50, 4242);
        CHECK(verdict.pass);
        CHECK(verdict.orders_checked == 51);
    }
}

TEST_CASE("exhaustive permutation check over all orders of a small prefix") {
    Dataset ds = ts::fixture_f();
    ds.tuples.resize(5);
    const auto verdict = exhaustive_permutation_check(ds, ts::fixture_f_spec(),
                                                      Policy::Duplicate);
    CHECK(verdict.pass);
    CHECK(verdict.orders_checked == 120);
}

TEST_CASE("permutation_check flags an order-dependent runner") {
    // greedy first-fit partition: each tuple joins the first group it is
    // within eps of every member of
    const Runner greedy = [](const Dataset& d, const SimilaritySpec& s,
                             Policy) {
        GroupSet out;
        std::vector<std::vector<const Tuple*>> groups;
        for (const Tuple& t : d.tuples) {
            bool placed = false;
            for (std::size_t g = 0; g < groups.size() && !placed; ++g) {
                bool ok = true;
                for (const Tuple* m : groups[g])
                    if (!is_similar(s, m->point, t.point)) {
                        ok = false;
                        break;
                    }
                if (ok) {
                    groups[g].push_back(&t);
                    placed = true;
                }
            }
            if (!placed) groups.push_back({&t});
        }
        for (const auto& g : groups) {
            std::vector<TupleId> ids;
            for (const Tuple* m : g) ids.push_back(m->id);
            out.groups.push_back(std::move(ids));
        }
        return out;
    };

    const Dataset ds = make_dataset({{0, 0}, {4, 0}, {8, 0}});
    const auto verdict =
        permutation_check(ds, {Metric::L2, 5.0}, Policy::Duplicate, 50, 7, greedy);
    CHECK_FALSE(verdict.pass);
    REQUIRE(verdict.witness.has_value());
    CHECK_FALSE(verdict.witness->output_a == verdict.witness->output_b);
    CHECK(verdict.witness->order_a != verdict.witness->order_b);
}
