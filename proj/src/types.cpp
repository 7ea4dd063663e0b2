#include "sgb/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace sgb {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

std::string_view to_string(Metric m) {
    return m == Metric::L2 ? "l2" : "linf";
}

std::string_view to_string(Policy p) {
    switch (p) {
        case Policy::Duplicate: return "duplicate";
        case Policy::Eliminate: return "eliminate";
        case Policy::NewGroup: return "new-group";
    }
    return "duplicate";
}

Metric parse_metric(std::string_view text) {
    const std::string t = lower(text);
    if (t == "l2") return Metric::L2;
    if (t == "linf") return Metric::LInf;
    throw InvalidInput("unknown metric: " + std::string(text));
}

Policy parse_policy(std::string_view text) {
    const std::string t = lower(text);
    if (t == "duplicate") return Policy::Duplicate;
    if (t == "eliminate") return Policy::Eliminate;
    if (t == "new-group") return Policy::NewGroup;
    throw InvalidInput("unknown overlap policy: " + std::string(text));
}

void validate(const SimilaritySpec& spec) {
    if (!std::isfinite(spec.eps) || spec.eps <= 0.0)
        throw InvalidInput("eps must be finite and > 0");
}

void Dataset::validate() const {
    std::vector<bool> seen;
    for (const Tuple& t : tuples) {
        if (t.point.size() != dimension)
            throw InvalidInput("tuple " + std::to_string(t.id) +
                               " has dimension " + std::to_string(t.point.size()) +
                               ", expected " + std::to_string(dimension));
        for (double v : t.point)
            if (!std::isfinite(v))
                throw InvalidInput("non-finite coordinate in tuple " +
                                   std::to_string(t.id));
        if (t.id >= seen.size()) seen.resize(t.id + 1, false);
        if (seen[t.id])
            throw InvalidInput("duplicate tuple id " + std::to_string(t.id));
        seen[t.id] = true;
    }
    if (!tuples.empty() && dimension == 0)
        throw InvalidInput("dataset dimension must be >= 1");
}

std::pair<std::vector<double>, std::vector<double>> Dataset::bounding_box()
    const {
    std::vector<double> lo(dimension, 0.0), hi(dimension, 0.0);
    if (tuples.empty()) return {lo, hi};
    lo.assign(tuples.front().point.begin(), tuples.front().point.end());
    hi = lo;
    for (const Tuple& t : tuples)
        for (std::size_t i = 0; i < dimension; ++i) {
            lo[i] = std::min(lo[i], t.point[i]);
            hi[i] = std::max(hi[i], t.point[i]);
        }
    return {lo, hi};
}

Dataset Dataset::permuted(const std::vector<std::size_t>& order) const {
    if (order.size() != tuples.size())
        throw InvalidInput("permutation length does not match dataset size");
    Dataset out;
    out.dimension = dimension;
    out.attr_names = attr_names;
    out.tuples.reserve(tuples.size());
    for (std::size_t pos : order) {
        if (pos >= tuples.size())
            throw InvalidInput("permutation index out of range");
        out.tuples.push_back(tuples[pos]);
    }
    return out;
}

Dataset make_dataset(const std::vector<std::vector<double>>& points) {
    Dataset ds;
    ds.dimension = points.empty() ? 0 : points.front().size();
    ds.tuples.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        ds.tuples.push_back({static_cast<TupleId>(i), points[i], {}});
    return ds;
}

GroupSet canonicalize(GroupSet gs) {
    for (auto& g : gs.groups) std::sort(g.begin(), g.end());
    std::sort(gs.groups.begin(), gs.groups.end());
    std::sort(gs.oset.begin(), gs.oset.end());
    return gs;
}

}  // namespace sgb
