#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgb/types.hpp"

namespace sgb::bench {

/// Synthetic 2D workload: Gaussian blobs of bounded radius (< eps/2, so each
/// blob is one clique) plus uniform background noise. clusters == 0 scales
/// the cluster count with n to keep clique sizes bounded.
struct GenSpec {
    std::size_t n = 0;
    std::size_t clusters = 0;
    double eps = 2.0;
    double noise_fraction = 0.1;
    std::uint64_t seed = 42;
};

Dataset clustered_dataset(const GenSpec& spec);

struct BenchRow {
    std::size_t n = 0;
    std::size_t groups = 0;
    double mean_group_size = 0.0;
    double ms_accelerated = 0.0;  // bounds + index on
    double ms_all_pairs = 0.0;    // both off
};

/// Times a Duplicate run with acceleration on and (optionally) off on the
/// same generated data. Both configurations are checked to produce
/// identical output. The accelerated time is the minimum over
/// `accel_repeats` runs to damp scheduler noise on short measurements.
BenchRow bench_one(const GenSpec& spec, bool run_all_pairs = true,
                   std::size_t accel_repeats = 1);

/// Fixed-width table; identical for identical seeds except the time columns.
std::string bench_table(const std::vector<BenchRow>& rows);

}  // namespace sgb::bench
