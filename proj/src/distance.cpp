#include "sgb/distance.hpp"

#include <cmath>

namespace sgb {

namespace detail {

double dist_sq_l2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double dist_linf(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::fabs(a[i] - b[i]);
        if (d > m) m = d;
    }
    return m;
}

}  // namespace detail

namespace {

void require_same_dimension(std::span<const double> a,
                            std::span<const double> b) {
    if (a.size() != b.size())
        throw InvalidInput("distance: points have different dimensions");
}

}  // namespace

double distance(const SimilaritySpec& spec, std::span<const double> a,
                std::span<const double> b) {
    require_same_dimension(a, b);
    if (spec.metric == Metric::L2) return std::sqrt(detail::dist_sq_l2(a, b));
    return detail::dist_linf(a, b);
}

bool is_similar(const SimilaritySpec& spec, std::span<const double> a,
                std::span<const double> b) {
    require_same_dimension(a, b);
    if (spec.metric == Metric::L2)
        return detail::dist_sq_l2(a, b) <= spec.eps * spec.eps;
    return detail::dist_linf(a, b) <= spec.eps;
}

bool is_all_eps_connected(const std::vector<Tuple>& tuples,
                          const SimilaritySpec& spec) {
    if (tuples.empty())
        throw InvalidInput("is_all_eps_connected: empty tuple set");
    for (std::size_t i = 0; i < tuples.size(); ++i)
        for (std::size_t j = i + 1; j < tuples.size(); ++j)
            if (!is_similar(spec, tuples[i].point, tuples[j].point))
                return false;
    return true;
}

std::size_t gpact(const std::vector<Tuple>& tuples,
                  const SimilaritySpec& spec) {
    if (tuples.empty()) throw InvalidInput("gpact: empty tuple set");
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < tuples.size(); ++i)
        for (std::size_t j = i + 1; j < tuples.size(); ++j)
            if (is_similar(spec, tuples[i].point, tuples[j].point)) ++pairs;
    return pairs;
}

}  // namespace sgb
