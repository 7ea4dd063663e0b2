#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sgb {

using TupleId = std::uint32_t;
using GroupId = std::uint32_t;

/// Thrown when a caller violates an operation precondition (bad dimension,
/// empty input where nonempty is required, non-finite coordinates, ...).
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an internal invariant breaks. Indicates a bug, not bad input.
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

enum class Metric { L2, LInf };

/// Arbitration policy for tuples that qualify for more than one group.
enum class Policy { Duplicate, Eliminate, NewGroup };

std::string_view to_string(Metric m);
std::string_view to_string(Policy p);
Metric parse_metric(std::string_view text);   // "l2" | "linf", case-insensitive
Policy parse_policy(std::string_view text);   // "duplicate" | "eliminate" | "new-group"

/// Distance metric plus similarity threshold. Two points are similar when
/// their distance is <= eps (inclusive).
struct SimilaritySpec {
    Metric metric = Metric::L2;
    double eps = 1.0;
};

void validate(const SimilaritySpec& spec);  // eps finite and > 0

/// One input row: a stable id, the grouping vector, and the non-grouping
/// attribute values (aligned with Dataset::attr_names).
struct Tuple {
    TupleId id = 0;
    std::vector<double> point;
    std::vector<double> attrs;
};

struct Dataset {
    std::size_t dimension = 0;
    std::vector<std::string> attr_names;
    std::vector<Tuple> tuples;

    std::size_t size() const { return tuples.size(); }
    bool empty() const { return tuples.empty(); }

    /// Checks uniform dimension, finite coordinates and unique ids.
    void validate() const;

    /// Axis-aligned bounding box of all points (lo, hi). Empty dataset
    /// yields zero-width bounds at the origin.
    std::pair<std::vector<double>, std::vector<double>> bounding_box() const;

    /// Same tuples presented in a different order; ids are preserved so
    /// outputs across permutations stay comparable.
    Dataset permuted(const std::vector<std::size_t>& order) const;
};

/// Builds a dataset from bare points, ids assigned 0..n-1 in order.
Dataset make_dataset(const std::vector<std::vector<double>>& points);

/// Operator output: the groups (member id lists), the set of tuple ids that
/// belong to two or more of those groups, and the policy that produced it.
struct GroupSet {
    std::vector<std::vector<TupleId>> groups;
    std::vector<TupleId> oset;
    Policy policy = Policy::Duplicate;

    friend bool operator==(const GroupSet&, const GroupSet&) = default;
};

/// Sorts members ascending, groups lexicographically by their id lists and
/// the overlap set ascending. Idempotent; makes set-equal outputs
/// bit-identical regardless of the order they were produced in.
GroupSet canonicalize(GroupSet gs);

}  // namespace sgb
