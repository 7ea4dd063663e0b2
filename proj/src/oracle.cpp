#include "sgb/oracle.hpp"

#include <algorithm>

#include "sgb/distance.hpp"
#include "sgb/rng.hpp"

namespace sgb::oracle {

SimilarityGraph build_graph(const Dataset& dataset,
                            const SimilaritySpec& spec) {
    validate(spec);
    dataset.validate();
    SimilarityGraph g;
    const std::size_t n = dataset.size();
    g.ids.reserve(n);
    for (const Tuple& t : dataset.tuples) g.ids.push_back(t.id);
    g.adj.assign(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (is_similar(spec, dataset.tuples[i].point,
                           dataset.tuples[j].point)) {
                g.adj[i][j] = true;
                g.adj[j][i] = true;
            }
    return g;
}

namespace {

// Plain Bron-Kerbosch without pivoting, on sorted index vectors. Kept
// deliberately different from the engine's internal enumeration so the two
// never share a bug.
void extend(const SimilarityGraph& g, std::vector<std::size_t>& r,
            std::vector<std::size_t> p, std::vector<std::size_t> x,
            std::vector<std::vector<TupleId>>& out) {
    if (p.empty() && x.empty()) {
        std::vector<TupleId> clique;
        clique.reserve(r.size());
        for (std::size_t v : r) clique.push_back(g.ids[v]);
        std::sort(clique.begin(), clique.end());
        out.push_back(std::move(clique));
        return;
    }
    const std::vector<std::size_t> todo = p;
    for (std::size_t v : todo) {
        std::vector<std::size_t> p2, x2;
        for (std::size_t u : p)
            if (g.adj[v][u]) p2.push_back(u);
        for (std::size_t u : x)
            if (g.adj[v][u]) x2.push_back(u);
        r.push_back(v);
        extend(g, r, std::move(p2), std::move(x2), out);
        r.pop_back();
        p.erase(std::find(p.begin(), p.end(), v));
        x.insert(std::lower_bound(x.begin(), x.end(), v), v);
    }
}

std::vector<TupleId> overlapping_ids(
    const std::vector<std::vector<TupleId>>& groups) {
    std::vector<TupleId> all;
    for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
    std::sort(all.begin(), all.end());
    std::vector<TupleId> oset;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        while (j < all.size() && all[j] == all[i]) ++j;
        if (j - i >= 2) oset.push_back(all[i]);
        i = j;
    }
    return oset;
}

std::vector<std::vector<TupleId>> residuals(
    const std::vector<std::vector<TupleId>>& groups,
    const std::vector<TupleId>& oset) {
    std::vector<std::vector<TupleId>> out;
    for (const auto& g : groups) {
        std::vector<TupleId> rest;
        for (TupleId id : g)
            if (!std::binary_search(oset.begin(), oset.end(), id))
                rest.push_back(id);
        if (!rest.empty()) out.push_back(std::move(rest));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

std::vector<std::vector<TupleId>> maximal_cliques(const SimilarityGraph& g) {
    std::vector<std::vector<TupleId>> out;
    std::vector<std::size_t> r, p(g.vertex_count()), x;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = i;
    extend(g, r, std::move(p), std::move(x), out);
    return out;
}

GroupSet oracle_duplicate(const Dataset& dataset, const SimilaritySpec& spec) {
    GroupSet out;
    out.policy = Policy::Duplicate;
    if (dataset.empty()) return out;
    out.groups = maximal_cliques(build_graph(dataset, spec));
    out.oset = overlapping_ids(out.groups);
    return canonicalize(std::move(out));
}

GroupSet oracle_eliminate(const Dataset& dataset, const SimilaritySpec& spec) {
    GroupSet out;
    out.policy = Policy::Eliminate;
    if (dataset.empty()) return out;
    const auto cliques = maximal_cliques(build_graph(dataset, spec));
    out.groups = residuals(cliques, overlapping_ids(cliques));
    return canonicalize(std::move(out));
}

GroupSet oracle_new_group(const Dataset& dataset, const SimilaritySpec& spec) {
    GroupSet out;
    out.policy = Policy::NewGroup;
    Dataset remaining;
    remaining.dimension = dataset.dimension;
    remaining.tuples = dataset.tuples;
    while (!remaining.tuples.empty()) {
        const auto cliques = maximal_cliques(build_graph(remaining, spec));
        const auto oset = overlapping_ids(cliques);
        for (auto& g : residuals(cliques, oset)) out.groups.push_back(std::move(g));
        // same fixed point rule as the engine: a round fully covered by its
        // own overlap set cannot shrink, so its tuples are dropped
        if (oset.empty() || oset.size() == remaining.tuples.size()) break;
        std::vector<Tuple> next;
        for (const Tuple& t : remaining.tuples)
            if (std::binary_search(oset.begin(), oset.end(), t.id))
                next.push_back(t);
        remaining.tuples = std::move(next);
    }
    return canonicalize(std::move(out));
}

GroupSet oracle_run(const Dataset& dataset, const SimilaritySpec& spec,
                    Policy policy) {
    switch (policy) {
        case Policy::Duplicate: return oracle_duplicate(dataset, spec);
        case Policy::Eliminate: return oracle_eliminate(dataset, spec);
        case Policy::NewGroup: return oracle_new_group(dataset, spec);
    }
    throw InvalidInput("unknown policy");
}

Runner engine_runner(const EngineConfig& config) {
    return [config](const Dataset& d, const SimilaritySpec& s, Policy p) {
        return run(d, s, p, config);
    };
}

namespace {

std::vector<TupleId> id_order(const Dataset& d,
                              const std::vector<std::size_t>& order) {
    std::vector<TupleId> ids;
    ids.reserve(order.size());
    for (std::size_t pos : order) ids.push_back(d.tuples[pos].id);
    return ids;
}

}  // namespace

PermutationVerdict permutation_check(const Dataset& dataset,
                                     const SimilaritySpec& spec, Policy policy,
                                     std::size_t num_perms, std::uint64_t seed,
                                     const Runner& runner) {
    if (num_perms < 1) throw InvalidInput("permutation_check: num_perms >= 1");
    PermutationVerdict verdict;
    std::vector<std::size_t> identity(dataset.size());
    for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = i;

    const GroupSet base = canonicalize(runner(dataset, spec, policy));
    verdict.orders_checked = 1;

    std::mt19937_64 gen(seed);
    for (std::size_t k = 0; k < num_perms; ++k) {
        const auto order = rng::shuffled_order(dataset.size(), gen);
        const GroupSet got =
            canonicalize(runner(dataset.permuted(order), spec, policy));
        ++verdict.orders_checked;
        if (!(got == base)) {
            verdict.pass = false;
            verdict.witness = PermutationWitness{
                id_order(dataset, identity), id_order(dataset, order), base, got};
            return verdict;
        }
    }
    return verdict;
}

PermutationVerdict exhaustive_permutation_check(const Dataset& dataset,
                                                const SimilaritySpec& spec,
                                                Policy policy,
                                                const Runner& runner) {
    PermutationVerdict verdict;
    std::vector<std::size_t> identity(dataset.size());
    for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = i;

    const GroupSet base = canonicalize(runner(dataset, spec, policy));
    verdict.orders_checked = 1;

    std::vector<std::size_t> order = identity;
    while (std::next_permutation(order.begin(), order.end())) {
        const GroupSet got =
            canonicalize(runner(dataset.permuted(order), spec, policy));
        ++verdict.orders_checked;
        if (!(got == base)) {
            verdict.pass = false;
            verdict.witness = PermutationWitness{
                id_order(dataset, identity), id_order(dataset, order), base, got};
            return verdict;
        }
    }
    return verdict;
}

}  // namespace sgb::oracle
