#include "sgb/bench.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "sgb/engine.hpp"
#include "sgb/rng.hpp"

namespace sgb::bench {

Dataset clustered_dataset(const GenSpec& spec) {
    std::mt19937_64 gen(spec.seed);
    const std::size_t clusters =
        spec.clusters > 0 ? spec.clusters
                          : std::max<std::size_t>(1, spec.n / 100);
    // one jittered grid cell of side 6*eps per cluster keeps blob centers
    // at least 5*eps apart, so blobs never connect to each other
    const auto cells = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(clusters))));
    const double cell = 6.0 * spec.eps;
    const double side = cell * static_cast<double>(cells);

    std::vector<std::array<double, 2>> centers(clusters);
    for (std::size_t i = 0; i < clusters; ++i) {
        const double cx = (static_cast<double>(i % cells) + 0.5) * cell;
        const double cy = (static_cast<double>(i / cells) + 0.5) * cell;
        centers[i] = {cx + rng::uniform(gen, -0.5, 0.5) * spec.eps,
                      cy + rng::uniform(gen, -0.5, 0.5) * spec.eps};
    }

    const double cap = 0.45 * spec.eps;  // blob radius < eps/2: one clique
    std::vector<std::vector<double>> points;
    points.reserve(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        if (rng::uniform01(gen) < spec.noise_fraction) {
            points.push_back(
                {rng::uniform(gen, 0.0, side), rng::uniform(gen, 0.0, side)});
            continue;
        }
        const auto& c = centers[rng::uniform_index(gen, clusters)];
        double dx = 0.0, dy = 0.0;
        do {
            dx = rng::gaussian(gen) * spec.eps / 6.0;
            dy = rng::gaussian(gen) * spec.eps / 6.0;
        } while (dx * dx + dy * dy > cap * cap);
        points.push_back({c[0] + dx, c[1] + dy});
    }
    return make_dataset(points);
}

namespace {

double run_timed(const Dataset& data, const SimilaritySpec& spec,
                 const EngineConfig& cfg, GroupSet& out) {
    const auto t0 = std::chrono::steady_clock::now();
    out = run(data, spec, Policy::Duplicate, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

BenchRow bench_one(const GenSpec& spec, bool run_all_pairs,
                   std::size_t accel_repeats) {
    const Dataset data = clustered_dataset(spec);
    const SimilaritySpec sim{Metric::L2, spec.eps};

    BenchRow row;
    row.n = spec.n;

    GroupSet fast;
    row.ms_accelerated = run_timed(data, sim, {true, true}, fast);
    for (std::size_t rep = 1; rep < accel_repeats; ++rep) {
        GroupSet again;
        row.ms_accelerated = std::min(
            row.ms_accelerated, run_timed(data, sim, {true, true}, again));
        if (!(again == fast))
            throw InternalError("benchmark runs disagreed across repeats");
    }
    row.groups = fast.groups.size();
    std::size_t total = 0;
    for (const auto& g : fast.groups) total += g.size();
    row.mean_group_size =
        fast.groups.empty()
            ? 0.0
            : static_cast<double>(total) / static_cast<double>(fast.groups.size());

    if (run_all_pairs) {
        GroupSet slow;
        row.ms_all_pairs = run_timed(data, sim, {false, false}, slow);
        if (!(slow == fast))
            throw InternalError("acceleration changed the benchmark output");
    }
    return row;
}

std::string bench_table(const std::vector<BenchRow>& rows) {
    char line[160];
    std::string out;
    std::snprintf(line, sizeof line, "%10s %10s %10s %14s %14s\n", "n",
                  "groups", "mean_k", "ms_accel", "ms_all_pairs");
    out += line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%10zu %10zu %10.2f %14.1f %14.1f\n",
                      r.n, r.groups, r.mean_group_size, r.ms_accelerated,
                      r.ms_all_pairs);
        out += line;
    }
    return out;
}

}  // namespace sgb::bench
