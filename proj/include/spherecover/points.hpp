#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace spherecover {

// Contiguous row-major storage for points of one ambient dimension.
class PointSet {
 public:
  explicit PointSet(std::size_t dim = 0) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const { return data_.empty(); }

  std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<double> mutable_point(std::size_t i) { return {data_.data() + i * dim_, dim_}; }

  void push_back(std::span<const double> p);
  void append(const PointSet& other);
  void reserve(std::size_t count) { data_.reserve(count * dim_); }

  const std::vector<double>& data() const { return data_; }

  bool operator==(const PointSet&) const = default;

 private:
  std::size_t dim_;
  std::vector<double> data_;
};

// Angular range queries over a fixed set of sphere points.
//
// Points are normalized and bucketed on a grid over their projections onto
// up to four axes of a fixed random orthonormal frame, with cell side equal
// to the unit chord of the largest query angle. A projection differs by at
// most the chord, so a query only visits the 3^k neighbouring cells and the
// prefilter never drops a true hit; every candidate gets the exact test.
class CapIndex {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  CapIndex(const PointSet& centers, double max_angle);

  std::size_t size() const { return count_; }
  double max_angle() const { return max_angle_; }

  // Smallest center index within `angle` of p, or npos.
  std::size_t first_within(std::span<const double> p, double angle) const;
  bool any_within(std::span<const double> p, double angle) const;
  std::size_t count_within(std::span<const double> p, double angle) const;
  // Closest center within `angle`: (index, central angle), or (npos, inf).
  std::pair<std::size_t, double> nearest_within(std::span<const double> p, double angle) const;

 private:
  static constexpr std::size_t kMaxAxes = 4;
  using CellKey = std::array<std::int32_t, kMaxAxes>;
  struct CellHash {
    std::size_t operator()(const CellKey& key) const;
  };

  CellKey cell_of(const double* projections) const;
  void project(const double* unit_point, double* out) const;
  void normalize(std::span<const double> p, std::vector<double>& out) const;

  template <class Visit>
  void visit_candidates(const std::vector<double>& unit_p, Visit&& visit) const;

  std::size_t dim_;
  bool brute_;
  std::size_t count_;
  std::size_t axes_;
  double max_angle_;
  double cell_;
  std::vector<double> unit_;
  std::vector<double> frame_;
  std::unordered_map<CellKey, std::vector<std::uint32_t>, CellHash> cells_;
};

// Deterministic net on the sphere of radius `radius` in R^{n+1}: each of
// the 2(n+1) faces of the cube [-1,1]^{n+1} carries an m^n grid of cell
// midpoints, radially projected. Every sphere point lies within
// arcsin(sqrt(n)/m) of some net point. Points are generated on demand.
class CubeGridNet {
 public:
  static constexpr std::uint64_t kMaxSize = 1ULL << 31;

  CubeGridNet(int n, double radius, std::int64_t per_axis);

  // Smallest grid whose covering angle is <= angle.
  static CubeGridNet with_angle(int n, double radius, double angle);
  static std::int64_t per_axis_for_angle(int n, double angle);
  static double covering_angle_for(int n, std::int64_t per_axis);

  int n() const { return n_; }
  double radius() const { return radius_; }
  std::int64_t per_axis() const { return m_; }
  std::uint64_t size() const { return size_; }
  double covering_angle() const { return covering_angle_for(n_, m_); }

  void point(std::uint64_t i, std::span<double> out) const;
  PointSet materialize() const;

 private:
  int n_;
  double radius_;
  std::int64_t m_;
  std::uint64_t face_size_;
  std::uint64_t size_;
};

// Outcome of sweeping a grid net against caps of one angle.
struct GridSweep {
  std::vector<std::uint64_t> uncovered;  // ascending net indices
  std::uint64_t uncovered_count = 0;
  // Lower bound on min over net points of (angle - distance to the nearest
  // center); -inf when some point has no center nearby.
  double min_slack = 0.0;
};

enum class LeafTest {
  chord,   // within_angle: closed test with the 1e-12 chord slack
  angle,   // central_angle <= angle
};

// Finds the net points farther than `angle` from every center. Blocks of grid
// points are bounded by caps of radius 2 atan(h/2), h the block's half
// diagonal on its cube face; a block is settled whole when one center covers
// its bounding cap or no center can reach it, otherwise it is split. With
// collect = false only the count is kept.
GridSweep sweep_grid(const CubeGridNet& net, const PointSet& centers, double angle, LeafTest leaf, bool collect);

}  // namespace spherecover
