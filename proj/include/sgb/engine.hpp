#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "sgb/bounds.hpp"
#include "sgb/index.hpp"
#include "sgb/types.hpp"

namespace sgb {

/// Acceleration toggles. Output must be identical for every combination;
/// the flags only trade work for speed. use_index has no effect while
/// use_bounds is off (there are no rectangles to index then).
struct EngineConfig {
    bool use_index = true;
    bool use_bounds = true;
};

struct OverlapReport {
    std::vector<TupleId> oset;                       // ids in >= 2 groups, sorted
    std::map<TupleId, std::vector<GroupId>> membership;  // id -> group positions
};

/// Membership map and overlap set of a group set (group ids are positions
/// within gs.groups).
OverlapReport overlap_report(const GroupSet& gs);

/// One incremental ingestion pass under Duplicate semantics. After every
/// processed tuple the live group set equals the maximal cliques of the
/// similarity graph over the tuples seen so far.
class Engine {
  public:
    /// world is the extent handed to per-group point indexes (normally the
    /// dataset bounding box).
    Engine(const SimilaritySpec& spec, std::size_t dimension,
           const EngineConfig& config, const EpsRectangle& world);
    ~Engine();
    Engine(Engine&&) noexcept;
    Engine& operator=(Engine&&) noexcept;

    /// The live groups the tuple is within eps of every member of.
    std::vector<GroupId> group_query(const Tuple& t) const;

    /// For each live group not fully joinable by t: the members within eps
    /// of t. Groups with no such member are omitted.
    std::vector<std::pair<GroupId, std::vector<TupleId>>> overlap_query(
        const Tuple& t) const;

    /// Inserts t, joining every admitting group and spawning the new maximal
    /// cliques seeded by partial overlaps. Tuple ids must be unique.
    void process_tuple(const Tuple& t);

    /// Current member lists, one per live group, members sorted.
    std::vector<std::vector<TupleId>> groups() const;

    std::size_t processed_count() const;
    const SimilaritySpec& spec() const;
    const EngineConfig& config() const;

    /// Test aid: verifies group connectivity, bound and index consistency.
    /// Throws InternalError on violation. O(groups * members^2).
    void check_invariants() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Runs the operator over a whole dataset and applies the overlap policy.
///
/// Duplicate  — the maximal cliques of the similarity graph.
/// Eliminate  — Duplicate output with every overlapping tuple removed from
///              every group; emptied groups are dropped.
/// NewGroup   — Eliminate's groups, then the overlap tuples are regrouped in
///              further rounds until a round has no overlaps. A round whose
///              overlap set equals its entire input cannot make progress;
///              its tuples are dropped, which keeps the recursion finite and
///              order-independent.
///
/// The result is canonicalized.
GroupSet run(const Dataset& dataset, const SimilaritySpec& spec, Policy policy,
             const EngineConfig& config = {});

}  // namespace sgb
