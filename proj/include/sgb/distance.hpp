#pragma once

#include <span>
#include <vector>

#include "sgb/types.hpp"

namespace sgb {

namespace detail {

/// Squared Euclidean distance. All similarity decisions for L2 go through
/// this one accumulation so every code path makes the identical call.
double dist_sq_l2(std::span<const double> a, std::span<const double> b);

double dist_linf(std::span<const double> a, std::span<const double> b);

}  // namespace detail

/// Distance under the requested metric: Euclidean for L2, coordinate-wise
/// max absolute difference for LInf. Throws InvalidInput on dimension
/// mismatch.
double distance(const SimilaritySpec& spec, std::span<const double> a,
                std::span<const double> b);

/// True iff distance(spec, a, b) <= spec.eps. For L2 the comparison is done
/// on squared distances against eps^2, which is decision-identical and
/// avoids the sqrt in hot paths.
bool is_similar(const SimilaritySpec& spec, std::span<const double> a,
                std::span<const double> b);

/// True iff every unordered pair of tuples is similar. Singletons are
/// trivially connected. Throws InvalidInput on an empty set.
bool is_all_eps_connected(const std::vector<Tuple>& tuples,
                          const SimilaritySpec& spec);

/// Number of unordered similar pairs inside the group. Equals k*(k-1)/2
/// when the group is all-eps-connected. Throws InvalidInput on empty input.
std::size_t gpact(const std::vector<Tuple>& tuples, const SimilaritySpec& spec);

}  // namespace sgb
