#include "spherecover/points.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spherecover/capgeom.hpp"
#include "spherecover/rng.hpp"

namespace spherecover {
namespace {

constexpr std::uint64_t kFrameSeed = 0x5eedf4a3e0c0ffeeULL;

}  // namespace

void PointSet::push_back(std::span<const double> p) {
  if (p.size() != dim_) throw std::invalid_argument("PointSet::push_back: dimension mismatch");
  data_.insert(data_.end(), p.begin(), p.end());
}

void PointSet::append(const PointSet& other) {
  if (other.empty()) return;
  if (other.dim_ != dim_) throw std::invalid_argument("PointSet::append: dimension mismatch");
  data_.insert(data_.end(), other.data_.begin(), other.data_.end());
}

std::size_t CapIndex::CellHash::operator()(const CellKey& key) const {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::int32_t v : key) {
    h ^= static_cast<std::uint32_t>(v);
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h ^ (h >> 29));
}

CapIndex::CapIndex(const PointSet& centers, double max_angle)
    : dim_(centers.dim()),
      count_(centers.size()),
      axes_(std::min(centers.dim(), kMaxAxes)),
      max_angle_(max_angle) {
  if (!(max_angle > 0.0)) throw std::invalid_argument("CapIndex: max_angle must be positive");
  if (count_ > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("CapIndex: too many centers");
  cell_ = std::sqrt(unit_chord_sq_limit(max_angle));
  // Small sets and coarse cells gain nothing from bucketing.
  brute_ = count_ <= 256 || cell_ >= 0.5;

  // Orthonormal frame rows via Gram-Schmidt on Gaussian draws.
  Rng rng(kFrameSeed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  frame_.assign(axes_ * dim_, 0.0);
  for (std::size_t a = 0; a < axes_; ++a) {
    double* row = frame_.data() + a * dim_;
    for (;;) {
      for (std::size_t i = 0; i < dim_; ++i) row[i] = gauss(rng);
      for (std::size_t b = 0; b < a; ++b) {
        const double* prev = frame_.data() + b * dim_;
        double dot = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) dot += row[i] * prev[i];
        for (std::size_t i = 0; i < dim_; ++i) row[i] -= dot * prev[i];
      }
      double len2 = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) len2 += row[i] * row[i];
      if (len2 > 1e-12) {
        const double inv = 1.0 / std::sqrt(len2);
        for (std::size_t i = 0; i < dim_; ++i) row[i] *= inv;
        break;
      }
    }
  }

  unit_.resize(count_ * dim_);
  std::vector<double> tmp;
  std::array<double, kMaxAxes> proj{};
  for (std::size_t c = 0; c < count_; ++c) {
    normalize(centers[c], tmp);
    std::copy(tmp.begin(), tmp.end(), unit_.begin() + static_cast<std::ptrdiff_t>(c * dim_));
    if (brute_) continue;
    project(tmp.data(), proj.data());
    cells_[cell_of(proj.data())].push_back(static_cast<std::uint32_t>(c));
  }
}

void CapIndex::normalize(std::span<const double> p, std::vector<double>& out) const {
  if (p.size() != dim_) throw std::invalid_argument("CapIndex: query dimension mismatch");
  double len2 = 0.0;
  for (double x : p) len2 += x * x;
  const double inv = 1.0 / std::sqrt(len2);
  out.resize(dim_);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = p[i] * inv;
}

void CapIndex::project(const double* unit_point, double* out) const {
  for (std::size_t a = 0; a < axes_; ++a) {
    const double* row = frame_.data() + a * dim_;
    double dot = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) dot += row[i] * unit_point[i];
    out[a] = dot;
  }
}

CapIndex::CellKey CapIndex::cell_of(const double* projections) const {
  CellKey key{};
  for (std::size_t a = 0; a < axes_; ++a) key[a] = static_cast<std::int32_t>(std::floor(projections[a] / cell_));
  return key;
}

template <class Visit>
void CapIndex::visit_candidates(const std::vector<double>& unit_p, Visit&& visit) const {
  if (brute_) {
    for (std::size_t c = 0; c < count_; ++c) visit(c);
    return;
  }
  std::array<double, kMaxAxes> proj{};
  project(unit_p.data(), proj.data());
  const CellKey base = cell_of(proj.data());
  std::size_t combos = 1;
  for (std::size_t a = 0; a < axes_; ++a) combos *= 3;
  for (std::size_t code = 0; code < combos; ++code) {
    CellKey key = base;
    std::size_t rest = code;
    for (std::size_t a = 0; a < axes_; ++a) {
      key[a] += static_cast<std::int32_t>(rest % 3) - 1;
      rest /= 3;
    }
    const auto it = cells_.find(key);
    if (it == cells_.end()) continue;
    for (std::uint32_t c : it->second) visit(static_cast<std::size_t>(c));
  }
}

std::size_t CapIndex::first_within(std::span<const double> p, double angle) const {
  if (angle > max_angle_) throw std::invalid_argument("CapIndex: query angle exceeds the index radius");
  std::vector<double> unit_p;
  normalize(p, unit_p);
  const double limit = unit_chord_sq_limit(angle);
  std::size_t best = npos;
  visit_candidates(unit_p, [&](std::size_t c) {
    if (c >= best) return;
    const double* u = unit_.data() + c * dim_;
    double diff2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) diff2 += (u[i] - unit_p[i]) * (u[i] - unit_p[i]);
    if (diff2 <= limit) best = c;
  });
  return best;
}

bool CapIndex::any_within(std::span<const double> p, double angle) const { return first_within(p, angle) != npos; }

std::size_t CapIndex::count_within(std::span<const double> p, double angle) const {
  if (angle > max_angle_) throw std::invalid_argument("CapIndex: query angle exceeds the index radius");
  std::vector<double> unit_p;
  normalize(p, unit_p);
  const double limit = unit_chord_sq_limit(angle);
  std::size_t count = 0;
  visit_candidates(unit_p, [&](std::size_t c) {
    const double* u = unit_.data() + c * dim_;
    double diff2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) diff2 += (u[i] - unit_p[i]) * (u[i] - unit_p[i]);
    if (diff2 <= limit) ++count;
  });
  return count;
}

std::pair<std::size_t, double> CapIndex::nearest_within(std::span<const double> p, double angle) const {
  if (angle > max_angle_) throw std::invalid_argument("CapIndex: query angle exceeds the index radius");
  std::vector<double> unit_p;
  normalize(p, unit_p);
  const double limit = unit_chord_sq_limit(angle);
  std::size_t best = npos;
  double best_diff2 = limit;
  visit_candidates(unit_p, [&](std::size_t c) {
    const double* u = unit_.data() + c * dim_;
    double diff2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) diff2 += (u[i] - unit_p[i]) * (u[i] - unit_p[i]);
    if (diff2 < best_diff2 || (diff2 == best_diff2 && c < best)) {
      best = c;
      best_diff2 = diff2;
    }
  });
  if (best == npos) return {npos, std::numeric_limits<double>::infinity()};
  return {best, central_angle(unit_p, std::span<const double>(unit_.data() + best * dim_, dim_))};
}

CubeGridNet::CubeGridNet(int n, double radius, std::int64_t per_axis) : n_(n), radius_(radius), m_(per_axis) {
  if (n < 1) throw std::invalid_argument("CubeGridNet: n must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("CubeGridNet: radius must be positive");
  if (per_axis < 1) throw std::invalid_argument("CubeGridNet: need at least one point per axis");
  const double log_size = std::log(2.0 * (n + 1)) + n * std::log(static_cast<double>(per_axis));
  if (log_size > std::log(static_cast<double>(kMaxSize))) {
    throw std::length_error("CubeGridNet: net would exceed 2^31 points");
  }
  face_size_ = 1;
  for (int i = 0; i < n; ++i) face_size_ *= static_cast<std::uint64_t>(per_axis);
  size_ = face_size_ * 2 * static_cast<std::uint64_t>(n + 1);
}

double CubeGridNet::covering_angle_for(int n, std::int64_t per_axis) {
  const double ratio = std::sqrt(static_cast<double>(n)) / static_cast<double>(per_axis);
  return ratio >= 1.0 ? std::numbers::pi / 2 : std::asin(ratio);
}

std::int64_t CubeGridNet::per_axis_for_angle(int n, double angle) {
  if (!(angle > 0.0)) throw std::invalid_argument("CubeGridNet: angle must be positive");
  const double target = std::sin(std::min(angle, std::numbers::pi / 2));
  auto m = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(n)) / target));
  m = std::max<std::int64_t>(m, 1);
  while (covering_angle_for(n, m) > angle) ++m;
  return m;
}

CubeGridNet CubeGridNet::with_angle(int n, double radius, double angle) {
  return CubeGridNet(n, radius, per_axis_for_angle(n, angle));
}

void CubeGridNet::point(std::uint64_t i, std::span<double> out) const {
  if (i >= size_) throw std::out_of_range("CubeGridNet::point");
  const std::size_t dim = static_cast<std::size_t>(n_) + 1;
  if (out.size() != dim) throw std::invalid_argument("CubeGridNet::point: dimension mismatch");
  const std::uint64_t face = i / face_size_;
  std::uint64_t rest = i % face_size_;
  const std::size_t axis = static_cast<std::size_t>(face / 2);
  const double sign = (face % 2 == 0) ? 1.0 : -1.0;
  const double step = 2.0 / static_cast<double>(m_);
  double len2 = 1.0;
  for (std::size_t k = 0; k < dim; ++k) {
    if (k == axis) {
      out[k] = sign;
      continue;
    }
    const auto digit = static_cast<double>(rest % static_cast<std::uint64_t>(m_));
    rest /= static_cast<std::uint64_t>(m_);
    out[k] = -1.0 + step * (digit + 0.5);
    len2 += out[k] * out[k];
  }
  const double scale = radius_ / std::sqrt(len2);
  for (double& x : out) x *= scale;
}

PointSet CubeGridNet::materialize() const {
  const std::size_t dim = static_cast<std::size_t>(n_) + 1;
  PointSet out(dim);
  out.reserve(size_);
  std::vector<double> p(dim);
  for (std::uint64_t i = 0; i < size_; ++i) {
    point(i, p);
    out.push_back(p);
  }
  return out;
}

}  // namespace spherecover

namespace spherecover {
namespace {

struct Block {
  std::uint64_t face;
  std::vector<std::int64_t> lo;
  std::vector<std::int64_t> hi;  // exclusive
};

class Sweeper {
 public:
  Sweeper(const CubeGridNet& net, const PointSet& centers, double angle, LeafTest leaf, bool collect)
      : net_(net), angle_(angle), leaf_(leaf), collect_(collect), dim_(static_cast<std::size_t>(net.n()) + 1) {
    unit_.resize(centers.size() * dim_);
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const auto p = centers[c];
      double len2 = 0.0;
      for (double x : p) len2 += x * x;
      const double inv = 1.0 / std::sqrt(len2);
      for (std::size_t i = 0; i < dim_; ++i) unit_[c * dim_ + i] = p[i] * inv;
    }
    count_ = centers.size();
    step_ = 2.0 / static_cast<double>(net.per_axis());
    result_.min_slack = std::numeric_limits<double>::infinity();
  }

  GridSweep run() {
    std::vector<std::uint32_t> all(count_);
    for (std::size_t c = 0; c < count_; ++c) all[c] = static_cast<std::uint32_t>(c);
    const auto n = static_cast<std::size_t>(net_.n());
    for (std::uint64_t face = 0; face < 2 * dim_; ++face) {
      Block b{face, std::vector<std::int64_t>(n, 0), std::vector<std::int64_t>(n, net_.per_axis())};
      visit(b, all);
    }
    std::sort(result_.uncovered.begin(), result_.uncovered.end());
    return std::move(result_);
  }

 private:
  // Unit vector of the block's middle and its angular radius.
  double block_center(const Block& b, std::vector<double>& out) const {
    const std::size_t axis = static_cast<std::size_t>(b.face / 2);
    const double sign = (b.face % 2 == 0) ? 1.0 : -1.0;
    double len2 = 1.0;
    double half_diag2 = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < dim_; ++i) {
      if (i == axis) {
        out[i] = sign;
        continue;
      }
      const double first = -1.0 + step_ * (static_cast<double>(b.lo[k]) + 0.5);
      const double last = -1.0 + step_ * (static_cast<double>(b.hi[k] - 1) + 0.5);
      out[i] = 0.5 * (first + last);
      const double ext = 0.5 * (last - first);
      half_diag2 += ext * ext;
      len2 += out[i] * out[i];
      ++k;
    }
    const double inv = 1.0 / std::sqrt(len2);
    for (double& x : out) x *= inv;
    return 2.0 * std::atan(0.5 * std::sqrt(half_diag2));
  }

  double dist(const double* unit_p, std::uint32_t c) const {
    return central_angle(std::span<const double>(unit_p, dim_), std::span<const double>(unit_.data() + c * dim_, dim_));
  }

  std::uint64_t block_size(const Block& b) const {
    std::uint64_t size = 1;
    for (std::size_t k = 0; k < b.lo.size(); ++k) size *= static_cast<std::uint64_t>(b.hi[k] - b.lo[k]);
    return size;
  }

  std::uint64_t index_of(std::uint64_t face, const std::vector<std::int64_t>& digits) const {
    std::uint64_t idx = 0;
    for (std::size_t k = digits.size(); k-- > 0;) idx = idx * static_cast<std::uint64_t>(net_.per_axis()) + digits[k];
    std::uint64_t face_size = 1;
    for (std::size_t k = 0; k < digits.size(); ++k) face_size *= static_cast<std::uint64_t>(net_.per_axis());
    return face * face_size + idx;
  }

  void mark_uncovered(std::uint64_t index) {
    ++result_.uncovered_count;
    if (collect_) result_.uncovered.push_back(index);
  }

  void visit(const Block& b, const std::vector<std::uint32_t>& candidates) {
    std::vector<double> center(dim_);
    const double radius = block_center(b, center);
    const double reach_limit = angle_ * (1.0 + 1e-10) + radius + 1e-14;
    std::vector<std::uint32_t> near;
    double best_slack = -std::numeric_limits<double>::infinity();
    for (std::uint32_t c : candidates) {
      const double dd = dist(center.data(), c);
      if (dd > reach_limit) continue;
      near.push_back(c);
      best_slack = std::max(best_slack, angle_ - dd - radius);
    }
    if (near.empty()) {
      emit_all_uncovered(b);
      return;
    }
    // One center reaches every point of the block with room to spare.
    if (best_slack >= 1e-12) {
      result_.min_slack = std::min(result_.min_slack, best_slack);
      return;
    }
    if (block_size(b) <= 16) {
      leaf_points(b, near);
      return;
    }
    std::size_t widest = 0;
    for (std::size_t k = 1; k < b.lo.size(); ++k) {
      if (b.hi[k] - b.lo[k] > b.hi[widest] - b.lo[widest]) widest = k;
    }
    const std::int64_t mid = b.lo[widest] + (b.hi[widest] - b.lo[widest]) / 2;
    Block left = b, right = b;
    left.hi[widest] = mid;
    right.lo[widest] = mid;
    visit(left, near);
    visit(right, near);
  }

  template <class Fn>
  void for_each_point(const Block& b, Fn&& fn) const {
    std::vector<std::int64_t> digits = b.lo;
    const std::size_t n = digits.size();
    for (;;) {
      fn(digits);
      std::size_t k = 0;
      while (k < n) {
        if (++digits[k] < b.hi[k]) break;
        digits[k] = b.lo[k];
        ++k;
      }
      if (k == n) return;
    }
  }

  void emit_all_uncovered(const Block& b) {
    result_.min_slack = -std::numeric_limits<double>::infinity();
    if (!collect_) {
      result_.uncovered_count += block_size(b);
      return;
    }
    for_each_point(b, [&](const std::vector<std::int64_t>& digits) { mark_uncovered(index_of(b.face, digits)); });
  }

  void leaf_points(const Block& b, const std::vector<std::uint32_t>& near) {
    std::vector<double> p(dim_);
    std::vector<double> unit_p(dim_);
    for_each_point(b, [&](const std::vector<std::int64_t>& digits) {
      const std::uint64_t index = index_of(b.face, digits);
      net_.point(index, p);
      double len2 = 0.0;
      for (double x : p) len2 += x * x;
      const double inv = 1.0 / std::sqrt(len2);
      for (std::size_t i = 0; i < dim_; ++i) unit_p[i] = p[i] * inv;
      bool hit = false;
      double best = std::numeric_limits<double>::infinity();
      for (std::uint32_t c : near) {
        const double dd = dist(unit_p.data(), c);
        best = std::min(best, dd);
        if (leaf_ == LeafTest::chord) {
          if (within_angle(unit_p, std::span<const double>(unit_.data() + c * dim_, dim_), angle_)) hit = true;
        } else if (dd <= angle_) {
          hit = true;
        }
      }
      result_.min_slack = std::min(result_.min_slack, angle_ - best);
      if (!hit) mark_uncovered(index);
    });
  }

  const CubeGridNet& net_;
  double angle_;
  LeafTest leaf_;
  bool collect_;
  std::size_t dim_;
  std::size_t count_ = 0;
  double step_ = 0.0;
  std::vector<double> unit_;
  GridSweep result_;
};

}  // namespace

GridSweep sweep_grid(const CubeGridNet& net, const PointSet& centers, double angle, LeafTest leaf, bool collect) {
  if (!centers.empty() && centers.dim() != static_cast<std::size_t>(net.n()) + 1) {
    throw std::invalid_argument("sweep_grid: center dimension does not match the net");
  }
  if (centers.size() > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("sweep_grid: too many centers");
  Sweeper sweeper(net, centers, angle, leaf, collect);
  return sweeper.run();
}

}  // namespace spherecover
