#pragma once

#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "sgb/engine.hpp"
#include "sgb/types.hpp"

namespace sgb::oracle {

/// Explicit similarity graph: one vertex per tuple, an edge wherever the
/// similarity predicate holds. Ground truth for all engine testing.
struct SimilarityGraph {
    std::vector<TupleId> ids;            // vertex -> tuple id
    std::vector<std::vector<bool>> adj;  // symmetric, no self-loops

    std::size_t vertex_count() const { return ids.size(); }
};

/// O(n^2) pairwise scan.
SimilarityGraph build_graph(const Dataset& dataset, const SimilaritySpec& spec);

/// All maximal cliques, isolated vertices included as singletons. Member
/// lists are sorted; clique order is unspecified. Deliberately naive — run
/// at desk scale only.
std::vector<std::vector<TupleId>> maximal_cliques(const SimilarityGraph& g);

/// Declarative policy semantics, computed directly on the graph. These are
/// order-independent by construction and serve as the fixed point the engine
/// must match.
GroupSet oracle_duplicate(const Dataset& dataset, const SimilaritySpec& spec);
GroupSet oracle_eliminate(const Dataset& dataset, const SimilaritySpec& spec);
GroupSet oracle_new_group(const Dataset& dataset, const SimilaritySpec& spec);
GroupSet oracle_run(const Dataset& dataset, const SimilaritySpec& spec, Policy policy);

using Runner =
    std::function<GroupSet(const Dataset&, const SimilaritySpec&, Policy)>;

/// Default runner: the real engine under the given configuration.
Runner engine_runner(const EngineConfig& config = {});

struct PermutationWitness {
    std::vector<TupleId> order_a;
    std::vector<TupleId> order_b;
    GroupSet output_a;
    GroupSet output_b;
};

struct PermutationVerdict {
    bool pass = true;
    std::size_t orders_checked = 0;
    std::optional<PermutationWitness> witness;  // set on fail
};

/// Runs the runner on the identity order plus num_perms seeded shuffles and
/// compares the canonical outputs. Shuffles are Fisher-Yates draws from
/// std::mt19937_64 so failures reproduce across platforms.
PermutationVerdict permutation_check(const Dataset& dataset,
                                     const SimilaritySpec& spec, Policy policy,
                                     std::size_t num_perms, std::uint64_t seed,
                                     const Runner& runner = engine_runner());

/// Same comparison over every one of the n! input orders. Keep n small.
PermutationVerdict exhaustive_permutation_check(
    const Dataset& dataset, const SimilaritySpec& spec, Policy policy,
    const Runner& runner = engine_runner());

}  // namespace sgb::oracle
