#include "sgb/index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

namespace sgb {

// ---------------------------------------------------------------------------
// GroupIndex: an R-tree where deletes just unlink the entry and shrinking
// updates rewrite the entry rectangle in place. Node boxes only ever widen,
// which keeps them valid covers; the final filter against the live entry
// rectangles makes every query exact.
// ---------------------------------------------------------------------------

struct GroupIndex::Impl {
    struct Entry {
        GroupId gid = 0;
        EpsRectangle rect;
        bool alive = false;
    };

    struct Node {
        bool leaf = true;
        std::vector<double> lo, hi;  // cover of children / live entries
        std::vector<std::unique_ptr<Node>> children;
        std::vector<std::size_t> entries;  // slots, leaf only
        Node* parent = nullptr;
    };

    std::size_t dim;
    std::size_t cap;
    std::unique_ptr<Node> root;
    std::vector<Entry> pool;
    std::unordered_map<GroupId, std::size_t> slot_of;
    std::unordered_map<GroupId, Node*> leaf_of;
    std::size_t live = 0;

    Impl(std::size_t dimension, std::size_t node_capacity)
        : dim(dimension), cap(std::max<std::size_t>(node_capacity, 2)) {
        root = std::make_unique<Node>();
        reset_box(*root);
    }

    void reset_box(Node& n) const {
        n.lo.assign(dim, std::numeric_limits<double>::max());
        n.hi.assign(dim, std::numeric_limits<double>::lowest());
    }

    static void widen(Node& n, const std::vector<double>& lo,
                      const std::vector<double>& hi) {
        for (std::size_t i = 0; i < lo.size(); ++i) {
            n.lo[i] = std::min(n.lo[i], lo[i]);
            n.hi[i] = std::max(n.hi[i], hi[i]);
        }
    }

    static double volume(const std::vector<double>& lo,
                         const std::vector<double>& hi) {
        double v = 1.0;
        for (std::size_t i = 0; i < lo.size(); ++i)
            v *= std::max(0.0, hi[i] - lo[i]);
        return v;
    }

    double enlargement(const Node& n, const EpsRectangle& r) const {
        double grown = 1.0, current = 1.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double side = std::max(0.0, n.hi[i] - n.lo[i]);
            current *= side;
            grown *= std::max(n.hi[i], r.hi[i]) - std::min(n.lo[i], r.lo[i]);
        }
        return grown - current;
    }

    static double boxes_overlap_volume(const std::vector<double>& alo,
                                       const std::vector<double>& ahi,
                                       const std::vector<double>& blo,
                                       const std::vector<double>& bhi) {
        double v = 1.0;
        for (std::size_t i = 0; i < alo.size(); ++i) {
            const double side =
                std::min(ahi[i], bhi[i]) - std::max(alo[i], blo[i]);
            if (side <= 0.0) return 0.0;
            v *= side;
        }
        return v;
    }

    // total overlap between child c grown by r and its siblings
    double overlap_enlargement(const Node& parent, std::size_t c,
                               const EpsRectangle& r) const {
        std::vector<double> lo = parent.children[c]->lo;
        std::vector<double> hi = parent.children[c]->hi;
        double before = 0.0, after = 0.0;
        for (std::size_t s = 0; s < parent.children.size(); ++s) {
            if (s == c) continue;
            before += boxes_overlap_volume(lo, hi, parent.children[s]->lo,
                                           parent.children[s]->hi);
        }
        for (std::size_t i = 0; i < dim; ++i) {
            lo[i] = std::min(lo[i], r.lo[i]);
            hi[i] = std::max(hi[i], r.hi[i]);
        }
        for (std::size_t s = 0; s < parent.children.size(); ++s) {
            if (s == c) continue;
            after += boxes_overlap_volume(lo, hi, parent.children[s]->lo,
                                          parent.children[s]->hi);
        }
        return after - before;
    }

    Node* choose_leaf(const EpsRectangle& r) {
        Node* n = root.get();
        while (!n->leaf) {
            const bool leaf_level = n->children.front()->leaf;
            std::size_t best = 0;
            double best_ovl = 0.0, best_enl = 0.0, best_vol = 0.0;
            for (std::size_t c = 0; c < n->children.size(); ++c) {
                const double ovl =
                    leaf_level ? overlap_enlargement(*n, c, r) : 0.0;
                const double enl = enlargement(*n->children[c], r);
                const double vol = volume(n->children[c]->lo,
                                          n->children[c]->hi);
                const bool better =
                    c == 0 || ovl < best_ovl ||
                    (ovl == best_ovl &&
                     (enl < best_enl || (enl == best_enl && vol < best_vol)));
                if (better) {
                    best = c;
                    best_ovl = ovl;
                    best_enl = enl;
                    best_vol = vol;
                }
            }
            n = n->children[best].get();
        }
        return n;
    }

    const EpsRectangle& rect_of_slot(std::size_t s) const {
        return pool[s].rect;
    }

    void box_of_child(const Node& n, std::size_t i, std::vector<double>& lo,
                      std::vector<double>& hi) const {
        if (n.leaf) {
            const auto& r = rect_of_slot(n.entries[i]);
            lo = r.lo;
            hi = r.hi;
        } else {
            lo = n.children[i]->lo;
            hi = n.children[i]->hi;
        }
    }

    static double margin(const std::vector<double>& lo,
                         const std::vector<double>& hi) {
        double m = 0.0;
        for (std::size_t i = 0; i < lo.size(); ++i) m += hi[i] - lo[i];
        return m;
    }

    // Split an overflowing node: pick the axis with the smallest margin sum
    // over all distributions, then the distribution with the least overlap
    // between the two halves.
    std::unique_ptr<Node> split(Node& n) {
        const std::size_t count = n.leaf ? n.entries.size() : n.children.size();
        std::vector<std::vector<double>> los(count), his(count);
        for (std::size_t i = 0; i < count; ++i) box_of_child(n, i, los[i], his[i]);

        const std::size_t min_fill =
            std::max<std::size_t>(1, (cap * 2) / 5);  // 40 percent fill
        std::vector<std::size_t> order(count), best_order;
        for (std::size_t i = 0; i < count; ++i) order[i] = i;

        // running boxes: prefix[k] covers order[0..k-1], suffix[k] the rest
        std::vector<std::vector<double>> plo(count + 1), phi(count + 1),
            slo(count + 1), shi(count + 1);
        auto sweep = [&]() {
            plo[0].assign(dim, std::numeric_limits<double>::max());
            phi[0].assign(dim, std::numeric_limits<double>::lowest());
            slo[count] = plo[0];
            shi[count] = phi[0];
            for (std::size_t k = 0; k < count; ++k) {
                plo[k + 1] = plo[k];
                phi[k + 1] = phi[k];
                for (std::size_t i = 0; i < dim; ++i) {
                    plo[k + 1][i] = std::min(plo[k + 1][i], los[order[k]][i]);
                    phi[k + 1][i] = std::max(phi[k + 1][i], his[order[k]][i]);
                }
            }
            for (std::size_t k = count; k-- > 0;) {
                slo[k] = slo[k + 1];
                shi[k] = shi[k + 1];
                for (std::size_t i = 0; i < dim; ++i) {
                    slo[k][i] = std::min(slo[k][i], los[order[k]][i]);
                    shi[k][i] = std::max(shi[k][i], his[order[k]][i]);
                }
            }
        };

        double best_margin = std::numeric_limits<double>::max();
        std::size_t best_pivot = min_fill;
        for (std::size_t axis = 0; axis < dim; ++axis) {
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (los[a][axis] != los[b][axis])
                              return los[a][axis] < los[b][axis];
                          return his[a][axis] < his[b][axis];
                      });
            sweep();
            double margin_sum = 0.0;
            double axis_best_ovl = std::numeric_limits<double>::max();
            double axis_best_vol = std::numeric_limits<double>::max();
            std::size_t axis_pivot = min_fill;
            for (std::size_t k = min_fill; k + min_fill <= count; ++k) {
                margin_sum += margin(plo[k], phi[k]) + margin(slo[k], shi[k]);
                const double ovl =
                    boxes_overlap_volume(plo[k], phi[k], slo[k], shi[k]);
                const double vol =
                    volume(plo[k], phi[k]) + volume(slo[k], shi[k]);
                if (ovl < axis_best_ovl ||
                    (ovl == axis_best_ovl && vol < axis_best_vol)) {
                    axis_best_ovl = ovl;
                    axis_best_vol = vol;
                    axis_pivot = k;
                }
            }
            if (margin_sum < best_margin) {
                best_margin = margin_sum;
                best_order = order;
                best_pivot = axis_pivot;
            }
        }

        auto sibling = std::make_unique<Node>();
        sibling->leaf = n.leaf;
        reset_box(*sibling);

        std::vector<std::size_t> old_entries = std::move(n.entries);
        std::vector<std::unique_ptr<Node>> old_children = std::move(n.children);
        n.entries.clear();
        n.children.clear();
        reset_box(n);

        auto assign = [&](Node& dst, std::size_t i) {
            if (dst.leaf) {
                dst.entries.push_back(old_entries[i]);
                leaf_of[pool[old_entries[i]].gid] = &dst;
            } else {
                old_children[i]->parent = &dst;
                dst.children.push_back(std::move(old_children[i]));
            }
            widen(dst, los[i], his[i]);
        };

        for (std::size_t k = 0; k < count; ++k)
            assign(k < best_pivot ? n : *sibling, best_order[k]);
        return sibling;
    }

    void handle_overflow(Node* n) {
        while (n && (n->leaf ? n->entries.size() : n->children.size()) > cap) {
            auto sibling = split(*n);
            if (n == root.get()) {
                auto new_root = std::make_unique<Node>();
                new_root->leaf = false;
                reset_box(*new_root);
                widen(*new_root, n->lo, n->hi);
                widen(*new_root, sibling->lo, sibling->hi);
                n->parent = new_root.get();
                sibling->parent = new_root.get();
                new_root->children.push_back(std::move(root));
                new_root->children.push_back(std::move(sibling));
                root = std::move(new_root);
                return;
            }
            Node* parent = n->parent;
            sibling->parent = parent;
            widen(*parent, sibling->lo, sibling->hi);
            parent->children.push_back(std::move(sibling));
            n = parent;
        }
    }

    void insert(GroupId gid, const EpsRectangle& rect) {
        std::size_t slot;
        if (auto it = slot_of.find(gid); it != slot_of.end()) {
            slot = it->second;  // reinsert after remove
            pool[slot].rect = rect;
            pool[slot].alive = true;
        } else {
            slot = pool.size();
            pool.push_back({gid, rect, true});
            slot_of.emplace(gid, slot);
        }
        Node* leaf = choose_leaf(rect);
        leaf->entries.push_back(slot);
        leaf_of[gid] = leaf;
        for (Node* n = leaf; n; n = n->parent) widen(*n, rect.lo, rect.hi);
        handle_overflow(leaf);
        ++live;
    }

    void update_in_place(std::size_t slot, const EpsRectangle& rect) {
        pool[slot].rect = rect;
        for (Node* n = leaf_of[pool[slot].gid]; n; n = n->parent)
            widen(*n, rect.lo, rect.hi);
    }

    void remove(GroupId gid) {
        auto it = slot_of.find(gid);
        if (it == slot_of.end() || !pool[it->second].alive) return;
        pool[it->second].alive = false;
        Node* leaf = leaf_of[gid];
        auto& v = leaf->entries;
        v.erase(std::find(v.begin(), v.end(), it->second));
        leaf_of.erase(gid);
        --live;
    }

    template <typename NodePred, typename RectPred>
    void query(const NodePred& visit_node, const RectPred& take,
               std::vector<GroupId>& out) const {
        std::vector<const Node*> stack{root.get()};
        while (!stack.empty()) {
            const Node* n = stack.back();
            stack.pop_back();
            if (!visit_node(*n)) continue;
            if (n->leaf) {
                for (std::size_t slot : n->entries)
                    if (pool[slot].alive && take(pool[slot].rect))
                        out.push_back(pool[slot].gid);
            } else {
                for (const auto& c : n->children) stack.push_back(c.get());
            }
        }
        std::sort(out.begin(), out.end());
    }
};

GroupIndex::GroupIndex(std::size_t dimension, std::size_t node_capacity)
    : impl_(std::make_unique<Impl>(dimension, node_capacity)) {}
GroupIndex::~GroupIndex() = default;
GroupIndex::GroupIndex(GroupIndex&&) noexcept = default;
GroupIndex& GroupIndex::operator=(GroupIndex&&) noexcept = default;

void GroupIndex::upsert(GroupId gid, const EpsRectangle& rect) {
    if (rect.dimension() != impl_->dim)
        throw InvalidInput("GroupIndex: rectangle dimension mismatch");
    auto it = impl_->slot_of.find(gid);
    if (it != impl_->slot_of.end() && impl_->pool[it->second].alive)
        impl_->update_in_place(it->second, rect);
    else
        impl_->insert(gid, rect);
}

void GroupIndex::remove(GroupId gid) { impl_->remove(gid); }

std::vector<GroupId> GroupIndex::candidates_containing(
    std::span<const double> p) const {
    if (p.size() != impl_->dim)
        throw InvalidInput("GroupIndex: point dimension mismatch");
    std::vector<GroupId> out;
    impl_->query(
        [&](const Impl::Node& n) {
            for (std::size_t i = 0; i < impl_->dim; ++i)
                if (p[i] < n.lo[i] || p[i] > n.hi[i]) return false;
            return true;
        },
        [&](const EpsRectangle& r) { return rect_contains(r, p); }, out);
    return out;
}

std::vector<GroupId> GroupIndex::candidates_intersecting(
    const EpsRectangle& r) const {
    if (r.dimension() != impl_->dim)
        throw InvalidInput("GroupIndex: rectangle dimension mismatch");
    std::vector<GroupId> out;
    impl_->query(
        [&](const Impl::Node& n) {
            for (std::size_t i = 0; i < impl_->dim; ++i)
                if (n.hi[i] < r.lo[i] || r.hi[i] < n.lo[i]) return false;
            return true;
        },
        [&](const EpsRectangle& e) { return rects_intersect(e, r); }, out);
    return out;
}

std::size_t GroupIndex::size() const { return impl_->live; }

std::optional<EpsRectangle> GroupIndex::rect_of(GroupId gid) const {
    auto it = impl_->slot_of.find(gid);
    if (it == impl_->slot_of.end() || !impl_->pool[it->second].alive)
        return std::nullopt;
    return impl_->pool[it->second].rect;
}

// ---------------------------------------------------------------------------
// PointIndex
// ---------------------------------------------------------------------------

namespace {

struct QuadNode {
    double cx = 0, cy = 0, half = 0;
    std::vector<std::pair<TupleId, Point2>> bucket;
    std::unique_ptr<QuadNode> kids[4];

    bool is_leaf() const { return !kids[0]; }

    int quadrant(Point2 p) const {
        return (p[0] >= cx ? 1 : 0) | (p[1] >= cy ? 2 : 0);
    }

    bool square_intersects(const EpsRectangle& r) const {
        return !(cx + half < r.lo[0] || r.hi[0] < cx - half ||
                 cy + half < r.lo[1] || r.hi[1] < cy - half);
    }
};

constexpr std::size_t kQuadBucket = 8;
constexpr int kQuadMaxDepth = 24;

}  // namespace

struct PointIndex::Impl {
    std::size_t dim;
    std::size_t count = 0;

    // 2D: quadtree
    std::unique_ptr<QuadNode> qroot;
    std::vector<std::pair<TupleId, Point2>> stragglers;  // outside the root

    // other dimensions: uniform grid over the extent
    double cell = 1.0;
    std::vector<double> origin;
    std::map<std::vector<std::int64_t>,
             std::vector<std::pair<TupleId, std::vector<double>>>>
        grid;

    Impl(const EpsRectangle& extent, double cell_hint) : dim(extent.dimension()) {
        if (dim == 2) {
            const double cx = (extent.lo[0] + extent.hi[0]) / 2;
            const double cy = (extent.lo[1] + extent.hi[1]) / 2;
            double half = std::max(extent.hi[0] - extent.lo[0],
                                   extent.hi[1] - extent.lo[1]) /
                          2;
            half = std::max(half, std::max(cell_hint, 1e-9)) * 1.0009765625;
            qroot = std::make_unique<QuadNode>();
            qroot->cx = cx;
            qroot->cy = cy;
            qroot->half = half;
        } else {
            cell = std::max(cell_hint, 1e-9);
            origin = extent.lo;
        }
    }

    bool in_root(Point2 p) const {
        return std::fabs(p[0] - qroot->cx) <= qroot->half &&
               std::fabs(p[1] - qroot->cy) <= qroot->half;
    }

    void quad_insert(QuadNode& n, TupleId id, Point2 p, int depth) {
        if (n.is_leaf()) {
            if (n.bucket.size() < kQuadBucket || depth >= kQuadMaxDepth) {
                n.bucket.emplace_back(id, p);
                return;
            }
            const double h = n.half / 2;
            for (int q = 0; q < 4; ++q) {
                auto kid = std::make_unique<QuadNode>();
                kid->cx = n.cx + ((q & 1) ? h : -h);
                kid->cy = n.cy + ((q & 2) ? h : -h);
                kid->half = h;
                n.kids[q] = std::move(kid);
            }
            auto spill = std::move(n.bucket);
            n.bucket.clear();
            for (auto& [sid, sp] : spill)
                quad_insert(*n.kids[n.quadrant(sp)], sid, sp, depth + 1);
        }
        quad_insert(*n.kids[n.quadrant(p)], id, p, depth + 1);
    }

    std::vector<std::int64_t> cell_of(std::span<const double> p) const {
        std::vector<std::int64_t> c(dim);
        for (std::size_t i = 0; i < dim; ++i)
            c[i] = static_cast<std::int64_t>(std::floor((p[i] - origin[i]) / cell));
        return c;
    }
};

PointIndex::PointIndex(const EpsRectangle& extent, double cell_hint)
    : impl_(std::make_unique<Impl>(extent, cell_hint)) {}
PointIndex::~PointIndex() = default;
PointIndex::PointIndex(PointIndex&&) noexcept = default;
PointIndex& PointIndex::operator=(PointIndex&&) noexcept = default;

void PointIndex::insert(TupleId id, std::span<const double> p) {
    if (p.size() != impl_->dim)
        throw InvalidInput("PointIndex: point dimension mismatch");
    ++impl_->count;
    if (impl_->dim == 2) {
        const Point2 q{p[0], p[1]};
        if (!impl_->in_root(q))
            impl_->stragglers.emplace_back(id, q);
        else
            impl_->quad_insert(*impl_->qroot, id, q, 0);
        return;
    }
    impl_->grid[impl_->cell_of(p)].emplace_back(
        id, std::vector<double>(p.begin(), p.end()));
}

std::vector<TupleId> PointIndex::points_in_region(const EpsRectangle& r) const {
    if (r.dimension() != impl_->dim)
        throw InvalidInput("PointIndex: region dimension mismatch");
    std::vector<TupleId> out;
    if (impl_->dim == 2) {
        for (const auto& [id, p] : impl_->stragglers)
            if (rect_contains(r, p)) out.push_back(id);
        std::vector<const QuadNode*> stack{impl_->qroot.get()};
        while (!stack.empty()) {
            const QuadNode* n = stack.back();
            stack.pop_back();
            if (!n->square_intersects(r)) continue;
            for (const auto& [id, p] : n->bucket)
                if (rect_contains(r, p)) out.push_back(id);
            if (!n->is_leaf())
                for (const auto& kid : n->kids) stack.push_back(kid.get());
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    const auto c0 = impl_->cell_of(r.lo);
    const auto c1 = impl_->cell_of(r.hi);
    double span = 1.0;
    for (std::size_t i = 0; i < impl_->dim; ++i)
        span *= static_cast<double>(c1[i] - c0[i] + 1);

    auto scan_bucket = [&](const auto& bucket) {
        for (const auto& [id, p] : bucket)
            if (rect_contains(r, p)) out.push_back(id);
    };

    if (span > 4096.0) {  // sparse region iteration beats the odometer here
        for (const auto& [cell, bucket] : impl_->grid) {
            bool overlap = true;
            for (std::size_t i = 0; i < impl_->dim && overlap; ++i)
                overlap = cell[i] >= c0[i] && cell[i] <= c1[i];
            if (overlap) scan_bucket(bucket);
        }
    } else {
        std::vector<std::int64_t> cur = c0;
        while (true) {
            if (auto it = impl_->grid.find(cur); it != impl_->grid.end())
                scan_bucket(it->second);
            std::size_t axis = 0;
            while (axis < impl_->dim && ++cur[axis] > c1[axis]) {
                cur[axis] = c0[axis];
                ++axis;
            }
            if (axis == impl_->dim) break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t PointIndex::size() const { return impl_->count; }

}  // namespace sgb
