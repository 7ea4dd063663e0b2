#include "sgb/engine.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>

#include "sgb/distance.hpp"

namespace sgb {

namespace {

// Dense bit-matrix adjacency for the per-tuple neighbourhood graphs.
struct BitAdj {
    std::size_t n = 0;
    std::size_t words = 0;
    std::vector<std::uint64_t> bits;

    explicit BitAdj(std::size_t vertices)
        : n(vertices), words((vertices + 63) / 64), bits(n * words, 0) {}

    void connect(std::size_t i, std::size_t j) {
        bits[i * words + j / 64] |= std::uint64_t{1} << (j % 64);
        bits[j * words + i / 64] |= std::uint64_t{1} << (i % 64);
    }

    const std::uint64_t* row(std::size_t i) const { return &bits[i * words]; }
};

struct BitSet {
    std::vector<std::uint64_t> w;

    explicit BitSet(std::size_t words) : w(words, 0) {}

    void set(std::size_t i) { w[i / 64] |= std::uint64_t{1} << (i % 64); }
    void clear(std::size_t i) { w[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
    bool test(std::size_t i) const {
        return (w[i / 64] >> (i % 64)) & 1;
    }
    bool empty() const {
        for (auto x : w)
            if (x) return false;
        return true;
    }
};

std::size_t intersect_count(const BitSet& s, const std::uint64_t* row) {
    std::size_t c = 0;
    for (std::size_t k = 0; k < s.w.size(); ++k)
        c += static_cast<std::size_t>(__builtin_popcountll(s.w[k] & row[k]));
    return c;
}

BitSet intersect(const BitSet& s, const std::uint64_t* row) {
    BitSet out(s.w.size());
    for (std::size_t k = 0; k < s.w.size(); ++k) out.w[k] = s.w[k] & row[k];
    return out;
}

// Bron-Kerbosch with pivoting over the bit-matrix graph.
void bk_pivot(const BitAdj& g, std::vector<std::size_t>& r, BitSet p, BitSet x,
              const std::function<void(const std::vector<std::size_t>&)>& emit) {
    if (p.empty() && x.empty()) {
        emit(r);
        return;
    }
    // pivot: vertex of P u X with the most neighbours in P
    std::size_t pivot = g.n;
    std::size_t best = 0;
    bool found = false;
    for (std::size_t v = 0; v < g.n; ++v) {
        if (!p.test(v) && !x.test(v)) continue;
        const std::size_t c = intersect_count(p, g.row(v));
        if (!found || c > best) {
            pivot = v;
            best = c;
            found = true;
        }
    }
    for (std::size_t v = 0; v < g.n; ++v) {
        if (!p.test(v)) continue;
        if (pivot < g.n && ((g.row(pivot)[v / 64] >> (v % 64)) & 1)) continue;
        r.push_back(v);
        bk_pivot(g, r, intersect(p, g.row(v)), intersect(x, g.row(v)), emit);
        r.pop_back();
        p.clear(v);
        x.set(v);
    }
}

bool sorted_subset(const std::vector<TupleId>& small,
                   const std::vector<TupleId>& big) {
    if (small.size() > big.size()) return false;
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace

// ---------------------------------------------------------------------------

struct Engine::Impl {
    struct GroupState {
        GroupId gid = 0;
        std::vector<TupleId> members;  // sorted
        EpsRectangle rect;             // intersection of members' eps-regions
        std::optional<EpsHull> hull;   // L2 and dimension 2 only
        std::optional<PointIndex> pindex;
    };

    SimilaritySpec spec;
    std::size_t dim;
    EngineConfig cfg;
    EpsRectangle world;
    bool keep_hull;

    std::vector<GroupState> groups;
    GroupIndex gindex;
    std::vector<double> coords;  // id-indexed flat point storage
    std::size_t processed = 0;

    Impl(const SimilaritySpec& s, std::size_t dimension, const EngineConfig& c,
         const EpsRectangle& w)
        : spec(s),
          dim(dimension),
          cfg(c),
          world(w),
          keep_hull(c.use_bounds && s.metric == Metric::L2 && dimension == 2),
          gindex(dimension) {
        validate(spec);
        if (dim == 0) throw InvalidInput("engine: dimension must be >= 1");
        if (world.dimension() != dim)
            throw InvalidInput("engine: world extent dimension mismatch");
    }

    bool indexed() const { return cfg.use_index && cfg.use_bounds; }

    std::span<const double> point_of(TupleId id) const {
        return {coords.data() + static_cast<std::size_t>(id) * dim, dim};
    }

    void store_point(const Tuple& t) {
        const std::size_t need = (static_cast<std::size_t>(t.id) + 1) * dim;
        if (coords.size() < need) coords.resize(need, 0.0);
        std::copy(t.point.begin(), t.point.end(),
                  coords.begin() + static_cast<std::size_t>(t.id) * dim);
    }

    bool admits_all_members(const GroupState& g,
                            std::span<const double> p) const {
        for (TupleId m : g.members)
            if (!is_similar(spec, p, point_of(m))) return false;
        return true;
    }

    std::vector<GroupId> group_query_point(std::span<const double> p) const {
        std::vector<GroupId> out;
        if (!cfg.use_bounds) {
            for (const auto& g : groups)
                if (admits_all_members(g, p)) out.push_back(g.gid);
            return out;
        }
        std::vector<GroupId> cand;
        if (indexed()) {
            cand = gindex.candidates_containing(p);
        } else {
            for (const auto& g : groups)
                if (rect_contains(g.rect, p)) cand.push_back(g.gid);
        }
        if (spec.metric == Metric::LInf) return cand;  // rectangle is exact
        for (GroupId gid : cand) {
            const auto& g = groups[gid];
            if (dim == 2) {
                if (group_admits_l2(g.rect, *g.hull, Point2{p[0], p[1]},
                                    spec.eps))
                    out.push_back(gid);
            } else if (admits_all_members(g, p)) {
                out.push_back(gid);
            }
        }
        return out;
    }

    std::vector<std::pair<GroupId, std::vector<TupleId>>> overlap_query_point(
        std::span<const double> p, const std::vector<GroupId>& joined) const {
        std::vector<std::pair<GroupId, std::vector<TupleId>>> out;
        auto is_joined = [&](GroupId gid) {
            return std::binary_search(joined.begin(), joined.end(), gid);
        };
        if (!cfg.use_bounds) {
            for (const auto& g : groups) {
                if (is_joined(g.gid)) continue;
                std::vector<TupleId> hit;
                for (TupleId m : g.members)
                    if (is_similar(spec, p, point_of(m))) hit.push_back(m);
                if (!hit.empty()) out.emplace_back(g.gid, std::move(hit));
            }
            return out;
        }
        const EpsRectangle region = eps_region(p, spec.eps);
        std::vector<GroupId> cand;
        if (indexed()) {
            cand = gindex.candidates_intersecting(region);
        } else {
            for (const auto& g : groups)
                if (rects_intersect(g.rect, region)) cand.push_back(g.gid);
        }
        for (GroupId gid : cand) {
            if (is_joined(gid)) continue;
            const auto& g = groups[gid];
            std::vector<TupleId> hit = g.pindex->points_in_region(region);
            // the eps-region retrieval is an LInf prefilter; confirm with the
            // metric's own predicate
            std::erase_if(hit, [&](TupleId m) {
                return !is_similar(spec, p, point_of(m));
            });
            if (!hit.empty()) out.emplace_back(gid, std::move(hit));
        }
        return out;
    }

    void add_member(GroupState& g, TupleId id) {
        const auto p = point_of(id);
        g.members.insert(
            std::lower_bound(g.members.begin(), g.members.end(), id), id);
        if (!cfg.use_bounds) return;
        auto shrunk = rect_intersect(g.rect, eps_region(p, spec.eps));
        if (!shrunk)
            throw InternalError("group eps-rectangle emptied by a member");
        g.rect = std::move(*shrunk);
        if (keep_hull) g.hull = hull_insert(*g.hull, Point2{p[0], p[1]});
        g.pindex->insert(id, p);
        if (indexed()) gindex.upsert(g.gid, g.rect);
    }

    GroupId create_group(std::vector<TupleId> members) {
        const GroupId gid = static_cast<GroupId>(groups.size());
        GroupState g;
        g.gid = gid;
        g.members = std::move(members);
        if (cfg.use_bounds) {
            g.pindex.emplace(world, spec.eps);
            bool first = true;
            for (TupleId m : g.members) {
                const auto p = point_of(m);
                const EpsRectangle region = eps_region(p, spec.eps);
                if (first) {
                    g.rect = region;
                    first = false;
                } else {
                    auto shrunk = rect_intersect(g.rect, region);
                    if (!shrunk)
                        throw InternalError(
                            "new group has an empty eps-rectangle");
                    g.rect = std::move(*shrunk);
                }
                g.pindex->insert(m, p);
            }
            if (keep_hull) {
                EpsHull h;
                for (TupleId m : g.members) {
                    const auto p = point_of(m);
                    h = hull_insert(h, Point2{p[0], p[1]});
                }
                g.hull = std::move(h);
            }
        }
        groups.push_back(std::move(g));
        if (indexed()) gindex.upsert(gid, groups.back().rect);
        return gid;
    }

    // Maximal cliques of the induced similarity graph over nbhd + t. Every
    // one contains t because t is within eps of the whole neighbourhood.
    std::vector<std::vector<TupleId>> neighbourhood_cliques(
        const std::vector<TupleId>& nbhd, TupleId tid) const {
        const std::size_t k = nbhd.size() + 1;
        BitAdj adj(k);
        for (std::size_t i = 0; i < nbhd.size(); ++i) {
            adj.connect(i, k - 1);
            for (std::size_t j = i + 1; j < nbhd.size(); ++j)
                if (is_similar(spec, point_of(nbhd[i]), point_of(nbhd[j])))
                    adj.connect(i, j);
        }
        std::vector<std::vector<TupleId>> cliques;
        BitSet p(adj.words), x(adj.words);
        for (std::size_t v = 0; v < k; ++v) p.set(v);
        std::vector<std::size_t> r;
        bk_pivot(adj, r, std::move(p), std::move(x),
                 [&](const std::vector<std::size_t>& clique) {
                     std::vector<TupleId> ids;
                     ids.reserve(clique.size());
                     bool has_t = false;
                     for (std::size_t v : clique) {
                         has_t |= (v + 1 == k);
                         ids.push_back(v + 1 == k ? tid : nbhd[v]);
                     }
                     if (!has_t)
                         throw InternalError(
                             "neighbourhood clique misses the new tuple");
                     std::sort(ids.begin(), ids.end());
                     cliques.push_back(std::move(ids));
                 });
        return cliques;
    }

    void process(const Tuple& t) {
        if (t.point.size() != dim)
            throw InvalidInput("process_tuple: tuple dimension mismatch");
        store_point(t);
        const auto p = point_of(t.id);

        const std::vector<GroupId> joined = group_query_point(p);
        const auto overlaps = overlap_query_point(p, joined);

        for (GroupId gid : joined) add_member(groups[gid], t.id);

        std::vector<TupleId> nbhd;
        for (const auto& [gid, ids] : overlaps)
            nbhd.insert(nbhd.end(), ids.begin(), ids.end());
        std::sort(nbhd.begin(), nbhd.end());
        nbhd.erase(std::unique(nbhd.begin(), nbhd.end()), nbhd.end());

        bool created = false;
        if (!nbhd.empty()) {
            auto cliques = neighbourhood_cliques(nbhd, t.id);
            // bigger candidates first so subsets meet their supersets
            std::sort(cliques.begin(), cliques.end(),
                      [](const auto& a, const auto& b) {
                          return a.size() > b.size();
                      });
            std::vector<GroupId> kept;
            for (auto& c : cliques) {
                // only a group containing t can subsume a candidate, and
                // those are exactly the groups t just joined
                bool subsumed = false;
                for (GroupId gid : joined)
                    if (sorted_subset(c, groups[gid].members)) {
                        subsumed = true;
                        break;
                    }
                for (GroupId gid : kept) {
                    if (subsumed) break;
                    if (sorted_subset(c, groups[gid].members)) subsumed = true;
                }
                if (subsumed) continue;
                kept.push_back(create_group(c));
                created = true;
            }
        }

        if (joined.empty() && !created) create_group({t.id});
        ++processed;
    }

    void check_invariants() const {
        for (const auto& g : groups) {
            if (g.members.empty()) throw InternalError("empty group");
            if (!std::is_sorted(g.members.begin(), g.members.end()))
                throw InternalError("group members not sorted");
            for (std::size_t i = 0; i < g.members.size(); ++i)
                for (std::size_t j = i + 1; j < g.members.size(); ++j)
                    if (!is_similar(spec, point_of(g.members[i]),
                                    point_of(g.members[j])))
                        throw InternalError("group is not all-eps-connected");
            if (cfg.use_bounds) {
                EpsRectangle want;
                bool first = true;
                for (TupleId m : g.members) {
                    const EpsRectangle region =
                        eps_region(point_of(m), spec.eps);
                    if (first) {
                        want = region;
                        first = false;
                    } else {
                        auto r = rect_intersect(want, region);
                        if (!r) throw InternalError("member regions disjoint");
                        want = std::move(*r);
                    }
                }
                if (!(want == g.rect))
                    throw InternalError("stale group eps-rectangle");
                if (g.pindex->size() != g.members.size())
                    throw InternalError("point index out of sync");
            }
            if (indexed()) {
                auto stored = gindex.rect_of(g.gid);
                if (!stored || !(*stored == g.rect))
                    throw InternalError("stale group index entry");
            }
        }
        if (indexed() && gindex.size() != groups.size())
            throw InternalError("group index size mismatch");
    }
};

Engine::Engine(const SimilaritySpec& spec, std::size_t dimension,
               const EngineConfig& config, const EpsRectangle& world)
    : impl_(std::make_unique<Impl>(spec, dimension, config, world)) {}
Engine::~Engine() = default;
Engine::Engine(Engine&&) noexcept = default;
Engine& Engine::operator=(Engine&&) noexcept = default;

std::vector<GroupId> Engine::group_query(const Tuple& t) const {
    if (t.point.size() != impl_->dim)
        throw InvalidInput("group_query: tuple dimension mismatch");
    return impl_->group_query_point(t.point);
}

std::vector<std::pair<GroupId, std::vector<TupleId>>> Engine::overlap_query(
    const Tuple& t) const {
    if (t.point.size() != impl_->dim)
        throw InvalidInput("overlap_query: tuple dimension mismatch");
    const auto joined = impl_->group_query_point(t.point);
    return impl_->overlap_query_point(t.point, joined);
}

void Engine::process_tuple(const Tuple& t) { impl_->process(t); }

std::vector<std::vector<TupleId>> Engine::groups() const {
    std::vector<std::vector<TupleId>> out;
    out.reserve(impl_->groups.size());
    for (const auto& g : impl_->groups) out.push_back(g.members);
    return out;
}

std::size_t Engine::processed_count() const { return impl_->processed; }
const SimilaritySpec& Engine::spec() const { return impl_->spec; }
const EngineConfig& Engine::config() const { return impl_->cfg; }
void Engine::check_invariants() const { impl_->check_invariants(); }

// ---------------------------------------------------------------------------

OverlapReport overlap_report(const GroupSet& gs) {
    OverlapReport rep;
    for (GroupId gid = 0; gid < gs.groups.size(); ++gid)
        for (TupleId id : gs.groups[gid]) rep.membership[id].push_back(gid);
    for (const auto& [id, gids] : rep.membership)
        if (gids.size() >= 2) rep.oset.push_back(id);
    return rep;
}

namespace {

EpsRectangle dataset_extent(const Dataset& data) {
    auto [lo, hi] = data.bounding_box();
    return EpsRectangle{std::move(lo), std::move(hi)};
}

std::vector<std::vector<TupleId>> duplicate_pass(const Dataset& data,
                                                 const SimilaritySpec& spec,
                                                 const EngineConfig& cfg) {
    Engine eng(spec, data.dimension, cfg, dataset_extent(data));
    for (const Tuple& t : data.tuples) eng.process_tuple(t);
    return eng.groups();
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

std::vector<std::vector<TupleId>> eliminate_residuals(
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

GroupSet run(const Dataset& dataset, const SimilaritySpec& spec, Policy policy,
             const EngineConfig& config) {
    validate(spec);
    dataset.validate();
    GroupSet out;
    out.policy = policy;
    if (dataset.empty()) return out;

    if (policy != Policy::NewGroup) {
        auto groups = duplicate_pass(dataset, spec, config);
        auto oset = overlapping_ids(groups);
        if (policy == Policy::Duplicate) {
            out.groups = std::move(groups);
            out.oset = std::move(oset);
        } else {
            out.groups = eliminate_residuals(groups, oset);
        }
        return canonicalize(std::move(out));
    }

    // NewGroup: regroup the overlap tuples round by round. A round whose
    // overlap covers its whole input cannot make progress (its tuples stay
    // mutually overlapped forever), so they are dropped like Eliminate does.
    Dataset remaining;
    remaining.dimension = dataset.dimension;
    remaining.tuples = dataset.tuples;
    std::size_t rounds = 0;
    while (!remaining.tuples.empty()) {
        auto groups = duplicate_pass(remaining, spec, config);
        auto oset = overlapping_ids(groups);
        for (auto& g : eliminate_residuals(groups, oset))
            out.groups.push_back(std::move(g));
        if (oset.empty() || oset.size() == remaining.tuples.size()) break;
        std::vector<Tuple> next;
        next.reserve(oset.size());
        for (const Tuple& t : remaining.tuples)
            if (std::binary_search(oset.begin(), oset.end(), t.id))
                next.push_back(t);
        remaining.tuples = std::move(next);
        if (++rounds > dataset.size())
            throw InternalError("new-group recursion exceeded its bound");
    }
    return canonicalize(std::move(out));
}

}  // namespace sgb
