#include <doctest.h>

#include <algorithm>
#include <random>

#include "sgb/distance.hpp"
#include "sgb/engine.hpp"
#include "sgb/oracle.hpp"
#include "test_support.hpp"

using namespace sgb;
namespace ts = sgb::testsupport;

namespace {

Engine engine_for(const Dataset& ds, const SimilaritySpec& spec,
                  const EngineConfig& cfg = {}) {
    auto [lo, hi] = ds.bounding_box();
    return Engine(spec, ds.dimension, cfg, EpsRectangle{lo, hi});
}

Engine engine_with_prefix(const Dataset& ds, const SimilaritySpec& spec,
                          std::size_t count, const EngineConfig& cfg = {}) {
    Engine eng = engine_for(ds, spec, cfg);
    for (std::size_t i = 0; i < count; ++i) eng.process_tuple(ds.tuples[i]);
    return eng;
}

}  // namespace

TEST_CASE("group_query") {
    const Dataset ds = ts::fixture_f();
    const SimilaritySpec spec = ts::fixture_f_spec();

    for (const EngineConfig& cfg : ts::kConfigs) {
        CAPTURE(cfg.use_index);
        CAPTURE(cfg.use_bounds);

        // empty state: nothing to join
        Engine fresh = engine_for(ds, spec, cfg);
        CHECK(fresh.group_query(ds.tuples[3]).empty());

        // after {t1,t2,t3} formed, t4=(10,0) joins nothing
        Engine eng = engine_with_prefix(ds, spec, 3, cfg);
        REQUIRE(eng.groups() == std::vector<std::vector<TupleId>>{{0, 1, 2}});
        CHECK(eng.group_query(ds.tuples[3]).empty());

        // singleton state {(0,0)}, t=(3,0) joins it
        Engine single = engine_with_prefix(ds, spec, 1, cfg);
        CHECK(single.group_query(ds.tuples[1]) == std::vector<GroupId>{0});
    }
}

TEST_CASE("overlap_query") {
    const Dataset ds = ts::fixture_f();
    const SimilaritySpec spec = ts::fixture_f_spec();

    for (const EngineConfig& cfg : ts::kConfigs) {
        CAPTURE(cfg.use_index);
        CAPTURE(cfg.use_bounds);

        // t4 sees only t3 of {t1,t2,t3}
        Engine eng = engine_with_prefix(ds, spec, 3, cfg);
        const auto oq = eng.overlap_query(ds.tuples[3]);
        REQUIRE(oq.size() == 1);
        CHECK(oq[0].first == 0);
        CHECK(oq[0].second == std::vector<TupleId>{2});

        // far away from everything: empty
        CHECK(eng.overlap_query(ds.tuples[6]).empty());
    }

    // a tuple within eps of one member of each of two groups reports both
    const Dataset two = make_dataset({{0, 0}, {-2, 0}, {10, 0}, {12, 0}});
    const SimilaritySpec spec6{Metric::L2, 6.0};
    for (const EngineConfig& cfg : ts::kConfigs) {
        Engine eng = engine_with_prefix(two, spec6, 4, cfg);
        REQUIRE(eng.groups().size() == 2);
        const Tuple probe{4, {5, 0}, {}};
        CHECK(eng.group_query(probe).empty());
        const auto oq = eng.overlap_query(probe);
        REQUIRE(oq.size() == 2);
        CHECK(oq[0].second == std::vector<TupleId>{0});
        CHECK(oq[1].second == std::vector<TupleId>{2});
    }
}

TEST_CASE("process_tuple maintains the maximal cliques incrementally") {
    const Dataset ds = ts::fixture_f();
    const SimilaritySpec spec = ts::fixture_f_spec();

    for (const EngineConfig& cfg : ts::kConfigs) {
        Engine eng = engine_for(ds, spec, cfg);
        for (const Tuple& t : ds.tuples) {
            eng.process_tuple(t);
            eng.check_invariants();
        }
        auto got = eng.groups();
        std::sort(got.begin(), got.end());
        CHECK(got == ts::fixture_f_duplicate_groups());
    }
}

TEST_CASE("first tuple forms a singleton group") {
    const Dataset ds = make_dataset({{7, 7}});
    Engine eng = engine_for(ds, {Metric::LInf, 1.0});
    eng.process_tuple(ds.tuples[0]);
    CHECK(eng.groups() == std::vector<std::vector<TupleId>>{{0}});
}

TEST_CASE("subsumed overlap candidates never become groups") {
    // Groups before the last step: A = {a,b,c,e}, B = {c,d}. The new tuple t
    // joins nothing, overlaps {a,b,c} of A and {c} of B, and {a,b,c,t} forms
    // a clique. The smaller candidate {c,t} is contained in it and must not
    // surface as a group.
    const Dataset ds = make_dataset({
        {0, 0},       // a = 0
        {1, 0},       // b = 1
        {0.5, 1},     // c = 2
        {-1, 0},      // e = 3
        {-1.5, 2.5},  // d = 4
        {1.5, 1.5},   // t = 5
    });
    const SimilaritySpec spec{Metric::LInf, 2.0};

    for (const EngineConfig& cfg : ts::kConfigs) {
        Engine eng = engine_with_prefix(ds, spec, 5, cfg);
        {
            auto before = eng.groups();
            std::sort(before.begin(), before.end());
            REQUIRE(before ==
                    std::vector<std::vector<TupleId>>{{0, 1, 2, 3}, {2, 4}});
        }
        CHECK(eng.group_query(ds.tuples[5]).empty());

        eng.process_tuple(ds.tuples[5]);
        eng.check_invariants();
        auto got = eng.groups();
        std::sort(got.begin(), got.end());
        CHECK(got == std::vector<std::vector<TupleId>>{
                         {0, 1, 2, 3}, {0, 1, 2, 5}, {2, 4}});
    }
}

TEST_CASE("run: fixture F under all three policies") {
    const Dataset ds = ts::fixture_f();
    const SimilaritySpec spec = ts::fixture_f_spec();

    const GroupSet dup = run(ds, spec, Policy::Duplicate);
    CHECK(dup.groups == ts::fixture_f_duplicate_groups());
    CHECK(dup.oset == std::vector<TupleId>{2, 3});

    const GroupSet elim = run(ds, spec, Policy::Eliminate);
    CHECK(elim.groups == ts::fixture_f_eliminate_groups());
    CHECK(elim.oset.empty());

    const GroupSet ng = run(ds, spec, Policy::NewGroup);
    CHECK(ng.groups == ts::fixture_f_new_group_groups());
    CHECK(ng.oset.empty());
}

TEST_CASE("run: empty dataset and single tuple") {
    for (const Policy p :
         {Policy::Duplicate, Policy::Eliminate, Policy::NewGroup}) {
        const GroupSet empty = run(make_dataset({}), {Metric::L2, 1.0}, p);
        CHECK(empty.groups.empty());
        CHECK(empty.policy == p);
        const GroupSet one = run(make_dataset({{1, 2}}), {Metric::L2, 1.0}, p);
        CHECK(one.groups == std::vector<std::vector<TupleId>>{{0}});
    }
}

TEST_CASE("run: new-group drops rounds that cannot shrink") {
    // 4-cycle: overlap covers the whole input, so the round is dropped
    const Dataset square = make_dataset({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    const SimilaritySpec spec{Metric::L2, 1.0};
    CHECK(run(square, spec, Policy::NewGroup).groups.empty());
    CHECK(run(square, spec, Policy::Eliminate).groups.empty());
    const GroupSet dup = run(square, spec, Policy::Duplicate);
    CHECK(dup.groups.size() == 4);
    CHECK(dup.oset.size() == 4);
}

TEST_CASE("overlap_report") {
    const GroupSet dup =
        run(ts::fixture_f(), ts::fixture_f_spec(), Policy::Duplicate);
    const OverlapReport rep = overlap_report(dup);
    CHECK(rep.oset == std::vector<TupleId>{2, 3});
    CHECK(rep.membership.at(2).size() == 2);
    CHECK(rep.membership.at(3).size() == 2);
    CHECK(rep.membership.at(0) == std::vector<GroupId>{0});

    GroupSet disjoint;
    disjoint.groups = {{0, 1}, {2, 3}};
    CHECK(overlap_report(disjoint).oset.empty());

    GroupSet triple;
    triple.groups = {{0, 1}, {0, 2}, {0, 3}};
    CHECK(overlap_report(triple).oset == std::vector<TupleId>{0});
}

TEST_CASE("duplicate output groups are maximal and connected") {
    std::mt19937_64 gen(47);
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t n = 2 + rng::uniform_index(gen, 10);
        const Dataset ds = ts::random_dataset(gen, n, 2, 8.0);
        const SimilaritySpec spec = ts::random_spec(gen);
        const GroupSet dup = run(ds, spec, Policy::Duplicate);

        for (const auto& g : dup.groups) {
            std::vector<Tuple> members;
            for (TupleId id : g) members.push_back(ds.tuples[id]);
            REQUIRE(is_all_eps_connected(members, spec));
            // no outsider is within eps of every member
            for (const Tuple& t : ds.tuples) {
                if (std::binary_search(g.begin(), g.end(), t.id)) continue;
                bool all = true;
                for (const Tuple& m : members)
                    if (!is_similar(spec, m.point, t.point)) {
                        all = false;
                        break;
                    }
                REQUIRE_FALSE(all);
            }
        }
        for (std::size_t i = 0; i < dup.groups.size(); ++i)
            for (std::size_t j = 0; j < dup.groups.size(); ++j)
                if (i != j)
                    REQUIRE_FALSE(std::includes(
                        dup.groups[j].begin(), dup.groups[j].end(),
                        dup.groups[i].begin(), dup.groups[i].end()));
    }
}

TEST_CASE("acceleration configuration never changes the output") {
    std::mt19937_64 gen(53);
    for (int trial = 0; trial < 80; ++trial) {
        const std::size_t n = 1 + rng::uniform_index(gen, 14);
        const std::size_t dim = 1 + rng::uniform_index(gen, 3);
        const Dataset ds = ts::random_dataset(gen, n, dim, 8.0);
        const SimilaritySpec spec = ts::random_spec(gen);
        for (const Policy p :
             {Policy::Duplicate, Policy::Eliminate, Policy::NewGroup}) {
            const GroupSet base = run(ds, spec, p, ts::kConfigs[0]);
            for (std::size_t c = 1; c < 4; ++c)
                CHECK(run(ds, spec, p, ts::kConfigs[c]) == base);
        }
    }
}

TEST_CASE("engine matches the oracle on random instances") {
    std::mt19937_64 gen(59);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = 1 + rng::uniform_index(gen, 12);
        const std::size_t dim = 1 + rng::uniform_index(gen, 3);
        const Dataset ds = ts::random_dataset(gen, n, dim, 7.0);
        const SimilaritySpec spec = ts::random_spec(gen);
        for (const Policy p :
             {Policy::Duplicate, Policy::Eliminate, Policy::NewGroup})
            CHECK(run(ds, spec, p) == oracle::oracle_run(ds, spec, p));
    }
}

TEST_CASE("eliminate and new-group outputs are pairwise disjoint") {
    std::mt19937_64 gen(61);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng::uniform_index(gen, 14);
        const Dataset ds = ts::random_dataset(gen, n, 2, 6.0);
        const SimilaritySpec spec = ts::random_spec(gen);
        for (const Policy p : {Policy::Eliminate, Policy::NewGroup}) {
            const GroupSet gs = run(ds, spec, p);
            CHECK(gs.groups.size() <= n);
            CHECK(overlap_report(gs).oset.empty());
        }
    }
}

TEST_CASE("duplicate coordinates are distinct tuples") {
    const Dataset ds = make_dataset({{1, 1}, {1, 1}, {9, 9}});
    const GroupSet dup = run(ds, {Metric::L2, 0.5}, Policy::Duplicate);
    CHECK(dup.groups == std::vector<std::vector<TupleId>>{{0, 1}, {2}});
}
