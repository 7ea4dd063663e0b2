#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "sgb/bounds.hpp"
#include "sgb/types.hpp"

namespace sgb {

/// Hierarchical axis-aligned-box tree over per-group eps-rectangle bounds.
/// Queries always decide against the current entry rectangles, so results
/// match a linear scan exactly; the tree only prunes. Node boxes are allowed
/// to stay loose after an entry shrinks.
class GroupIndex {
  public:
    explicit GroupIndex(std::size_t dimension, std::size_t node_capacity = 8);
    ~GroupIndex();
    GroupIndex(GroupIndex&&) noexcept;
    GroupIndex& operator=(GroupIndex&&) noexcept;

    /// Inserts or replaces the rectangle stored for gid.
    void upsert(GroupId gid, const EpsRectangle& rect);

    /// Removes gid; it is never returned from queries afterwards. No-op for
    /// unknown gids.
    void remove(GroupId gid);

    /// Exactly the gids whose rectangle contains p (boundary inclusive).
    std::vector<GroupId> candidates_containing(std::span<const double> p) const;

    /// Exactly the gids whose rectangle intersects r (closed semantics).
    std::vector<GroupId> candidates_intersecting(const EpsRectangle& r) const;

    std::size_t size() const;
    std::optional<EpsRectangle> rect_of(GroupId gid) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Per-group point index for eps-region member retrieval: a quadtree in 2D,
/// a uniform grid in other dimensions. The extent is normally the dataset's
/// bounding box; points outside it are still stored and found.
class PointIndex {
  public:
    /// cell_hint sizes grid cells (typically eps); ignored by the quadtree.
    PointIndex(const EpsRectangle& extent, double cell_hint);
    ~PointIndex();
    PointIndex(PointIndex&&) noexcept;
    PointIndex& operator=(PointIndex&&) noexcept;

    void insert(TupleId id, std::span<const double> p);

    /// Exactly the inserted ids whose point lies in r (boundary inclusive).
    std::vector<TupleId> points_in_region(const EpsRectangle& r) const;

    std::size_t size() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace sgb
