#pragma once

// Block construction: Y regions built from L/R parallelograms, their bounding
// wedges, the integer parameter search, and the 1-dependent percolation field
// of crossing events.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "wedgecp/contact.hpp"
#include "wedgecp/errors.hpp"
#include "wedgecp/paths.hpp"
#include "wedgecp/rational.hpp"
#include "wedgecp/regions.hpp"
#include "wedgecp/timeline.hpp"

namespace wedgecp {

struct LatticePoint {
  std::int64_t j = 0;
  std::int64_t k = 0;
  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
};

// Points (j, k) with 0 <= k <= K, |j| <= k, j + k even.
class RenormLattice {
 public:
  explicit RenormLattice(std::int64_t depth) : depth_(depth) {
    if (depth < 0) throw InvalidArgument("lattice depth must be non-negative");
  }
  std::int64_t depth() const { return depth_; }
  bool contains(LatticePoint p) const {
    return p.k >= 0 && p.k <= depth_ && (p.j < 0 ? -p.j : p.j) <= p.k && (p.j + p.k) % 2 == 0;
  }
  static std::int64_t norm(LatticePoint p) { return ((p.j < 0 ? -p.j : p.j) + (p.k < 0 ? -p.k : p.k)) / 2; }
  std::size_t row_size(std::int64_t k) const { return static_cast<std::size_t>(k + 1); }
  static std::size_t row_index(LatticePoint p) { return static_cast<std::size_t>((p.j + p.k) / 2); }
  std::vector<LatticePoint> points() const {
    std::vector<LatticePoint> out;
    for (std::int64_t k = 0; k <= depth_; ++k)
      for (std::int64_t j = -k; j <= k; j += 2) out.push_back({j, k});
    return out;
  }

 private:
  std::int64_t depth_;
};

// Time-per-space slopes of the two lines bounding Y from the left and right.
struct SlopePair {
  Rational s_l;
  Rational s_r;
};

inline SlopePair y_slopes(std::int64_t ell, std::int64_t d, const Rational& alpha, const Rational& beta) {
  if (ell - d - 1 <= 0) throw DegenerateGeometry("left bounding line is not defined when ell - d - 1 <= 0");
  if (!(alpha > beta)) throw InvalidArgument("need alpha > beta");
  const Rational top(ell + d + 1);
  return {top / (Rational(ell - d - 1) * (alpha - beta)), top / (Rational(ell - d + 1) * (alpha - beta))};
}

struct BoundingWedge {
  SlopePair slopes;
  Rational x_l;
  Rational x_r;
  Rational width;  // x_r - x_l
  Wedge wedge;     // W(1/s_l, 1/s_r, width) shifted by (x_l, 0)
};

namespace detail {

inline BoundingWedge bounding_geometry(std::int64_t ell, std::int64_t d, const Rational& M, const Rational& alpha,
                                       const Rational& beta) {
  const SlopePair s = y_slopes(ell, d, alpha, beta);
  const Rational x_l = -M * (3 * beta / 2 + beta / (alpha * s.s_l));
  const Rational x_r = M * (Rational(ell + 1) * (alpha - beta - 1 / s.s_r) + 3 * beta / 2);
  if (!(-M * alpha < x_l && x_l < x_r && x_r < M * alpha * Rational(ell + 2)))
    throw InternalConsistency("bounding wedge intercepts violate -M alpha < x_l < x_r < M alpha (ell+2)");
  return {s, x_l, x_r, x_r - x_l, Wedge(1 / s.s_l, 1 / s.s_r, x_r - x_l, x_l, Rational(0))};
}

}  // namespace detail

struct StagedParallelogram {
  Parallelogram shape;
  int stage = 0;
};

class YRegion {
 public:
  std::int64_t ell = 0;
  std::int64_t d = 0;
  Rational M;
  Rational alpha;
  Rational beta;
  LatticePoint index;  // which translate this is
  std::vector<StagedParallelogram> parts;  // distinct parallelograms in stage order
  // Bounding wedge of the whole union Y(ell, d, M); absent when ell - d - 1 = 0.
  std::optional<BoundingWedge> bounds;

  std::size_t size() const { return parts.size(); }

  // Lattice shift of the translate Y_jk, in parallelogram coordinates.
  LatticePoint shift_of(LatticePoint p) const { return {p.k * (ell - d) + p.j, p.k * (ell + d + 1)}; }

  YRegion translate(std::int64_t j, std::int64_t k) const {
    if (k < 0 || (j + k) % 2 != 0) throw InvalidArgument("Y translate needs k >= 0 and j+k even");
    YRegion out = *this;
    const LatticePoint now = shift_of(index), want = shift_of({j, k});
    out.index = {j, k};
    for (auto& p : out.parts) {
      const auto& s = p.shape;
      p.shape = Parallelogram::geometry(s.kind, s.j - now.j + want.j, s.k - now.k + want.k, M, alpha, beta);
    }
    return out;
  }

  ParallelogramUnion as_union() const {
    ParallelogramUnion u;
    for (const auto& p : parts) u.parts.push_back(p.shape);
    return u;
  }

  // R_00 translate: its bottom edge is the bottom edge of the Y region.
  const Parallelogram& base() const { return parts.front().shape; }

  Rational bottom_time() const { return base().bottom_time(); }
  Rational top_time() const {
    Rational t = parts.front().shape.top_time();
    for (const auto& p : parts) t = max(t, p.shape.top_time());
    return t;
  }
  SiteRange site_extent() const {
    SiteRange r = parts.front().shape.site_extent();
    for (const auto& p : parts) {
      const SiteRange e = p.shape.site_extent();
      r.first = std::min(r.first, e.first);
      r.last = std::max(r.last, e.last);
    }
    return r;
  }
};

namespace detail {

inline YRegion build_y(std::int64_t ell, std::int64_t d, const Rational& M, const Rational& alpha,
                       const Rational& beta, bool checked) {
  if (ell < 2 || d < 0 || d >= ell) throw InvalidArgument("Y region needs ell >= 2 and 0 <= d < ell");
  if (!(Rational(0) < beta && beta * 3 < alpha)) throw InvalidArgument("need 0 < beta < alpha/3");
  if (!(M > 0)) throw InvalidArgument("Y region scale M must be positive");
  if (checked && (!(M * beta / 2).is_integer() || !(M * alpha).is_integer()))
    throw InvalidArgument("Y region needs M*beta/2 and M*alpha integral");

  YRegion y;
  y.ell = ell;
  y.d = d;
  y.M = M;
  y.alpha = alpha;
  y.beta = beta;
  std::set<std::tuple<int, std::int64_t, std::int64_t>> seen;
  auto add = [&](ParallelogramKind kind, std::int64_t j, std::int64_t k, int stage) {
    if (!seen.insert({static_cast<int>(kind), j, k}).second) return;
    y.parts.push_back({Parallelogram::geometry(kind, j, k, M, alpha, beta), stage});
  };
  using K = ParallelogramKind;
  add(K::kR, 0, 0, 0);
  for (std::int64_t i = 1; i <= ell; ++i) {
    add(K::kR, i, i, 1);
    add(K::kLSmall, i, i, 1);
  }
  add(K::kL, ell, ell, 2);
  if (d >= 1) add(K::kL, ell + 1, ell + 1, 3);
  if (d == 1) {
    add(K::kL, ell - 1, ell + 1, 4);
    add(K::kRSmall, ell - 1, ell + 1, 4);
  } else if (d >= 2) {
    for (std::int64_t i = 0; i <= d - 1; ++i) {
      add(K::kL, ell - i, ell + i, 4);
      add(K::kRSmall, ell - i, ell + i, 4);
      add(K::kL, ell + 1 - i, ell + 1 + i, 4);
      add(K::kRSmall, ell + 1 - i, ell + 1 + i, 4);
    }
    add(K::kL, ell - d, ell + d, 5);
    add(K::kRSmall, ell - d, ell + d, 5);
  }
  if (ell - d - 1 > 0) y.bounds = bounding_geometry(ell, d, M, alpha, beta);
  return y;
}

}  // namespace detail

inline YRegion assemble_y_region(std::int64_t ell, std::int64_t d, const Rational& M, const Rational& alpha,
                                 const Rational& beta) {
  return detail::build_y(ell, d, M, alpha, beta, true);
}

// Union of Y_jk over rows k <= K, as a list of translates.
inline std::vector<YRegion> y_translates(const YRegion& y00, std::int64_t K) {
  std::vector<YRegion> out;
  for (const auto& p : RenormLattice(K).points()) out.push_back(y00.translate(p.j, p.k));
  return out;
}

struct CornerViolation {
  LatticePoint translate;
  std::string parallelogram;
  int corner = 0;  // 0 bottom-left, 1 bottom-right, 2 top-right, 3 top-left
  RationalPoint point;

  std::string describe() const {
    static const char* names[] = {"bottom-left", "bottom-right", "top-right", "top-left"};
    std::ostringstream os;
    os << names[corner] << " corner (" << point.x.str() << ", " << point.t.str() << ") of " << parallelogram
       << " in Y(" << translate.j << "," << translate.k << ")";
    return os.str();
  }
};

// First corner of Y_jk, k <= K, lying outside `wedge`, if any.
inline std::optional<CornerViolation> first_corner_outside(const YRegion& y00, std::int64_t K, const Wedge& wedge) {
  for (const auto& p : RenormLattice(K).points()) {
    const YRegion y = y00.translate(p.j, p.k);
    for (const auto& part : y.parts)
      for (int c = 0; c < 4; ++c) {
        const auto& pt = part.shape.corners[static_cast<std::size_t>(c)];
        if (!wedge.contains(pt.x, pt.t)) return CornerViolation{p, part.shape.label(), c, pt};
      }
  }
  return std::nullopt;
}

// Bounding wedge of Y(ell, d, M), checked against the corners of the rows
// k <= 3; the affine dependence of corners on k carries this to all rows.
inline BoundingWedge bounding_wedge(std::int64_t ell, std::int64_t d, const Rational& M, const Rational& alpha,
                                    const Rational& beta) {
  const YRegion y = detail::build_y(ell, d, M, alpha, beta, false);
  if (!y.bounds) y_slopes(ell, d, alpha, beta);  // throws DegenerateGeometry
  if (auto v = first_corner_outside(y, 3, y.bounds->wedge))
    throw InternalConsistency("bounding wedge misses the " + v->describe());
  return *y.bounds;
}

struct IntegerSolution {
  std::int64_t m = 0;
  std::int64_t c = 0;
  Rational s_l;        // 1 / alpha_l
  Rational s_r;        // 1 / alpha_r
  Rational s_l_prime;  // s_r m / (m - 1)
  Rational alpha;
  Rational beta;
  std::int64_t ell_prime = 0;
  std::int64_t d_prime = 0;
};

// Closed-form (ell, d) from the slopes; integers when the solution is valid.
inline std::pair<Rational, Rational> ell_d_from_slopes(const Rational& s_l, const Rational& s_r, const Rational& alpha,
                                                       const Rational& beta) {
  const Rational gap = s_l - s_r;
  return {s_r * (s_l * (alpha - beta) + 1) / gap, s_l * (s_r * (alpha - beta) - 1) / gap};
}

inline IntegerSolution solve_integer_wedge(const Rational& alpha, const Rational& alpha_l, const Rational& alpha_r,
                                           std::int64_t max_m = 1'000'000) {
  if (!(Rational(0) < alpha_l && alpha_l < alpha_r && alpha_r < alpha))
    throw InvalidArgument("need 0 < alpha_l < alpha_r < alpha");
  IntegerSolution sol;
  sol.alpha = alpha;
  sol.s_l = 1 / alpha_l;
  sol.s_r = 1 / alpha_r;
  const Rational m0 = 3 / (alpha * sol.s_r);
  std::int64_t m = std::max<std::int64_t>(2, m0.floor() + 1);
  while (!(sol.s_r * Rational(m, m - 1) < sol.s_l)) {
    if (++m > max_m)
      throw SearchExhausted("no m <= " + std::to_string(max_m) + " with s_r m/(m-1) < s_l (s_l=" + sol.s_l.str() +
                            ", s_r=" + sol.s_r.str() + ")");
  }
  sol.m = m;
  sol.s_l_prime = sol.s_r * Rational(m, m - 1);
  const Rational hi = alpha * Rational(m) * sol.s_r;
  const Rational lo = hi * Rational(2, 3);
  const std::int64_t c = std::max(m, lo.floor() + 1);
  if (!(Rational(c) < hi))
    throw SearchExhausted("no integer c >= m in (" + lo.str() + ", " + hi.str() + ")");
  sol.c = c;
  sol.beta = alpha - Rational(c) / (Rational(m) * sol.s_r);
  sol.ell_prime = c + m - 1;
  sol.d_prime = c - m;

  if (!(Rational(0) < sol.beta && sol.beta * 3 < alpha))
    throw InternalConsistency("integer solution produced beta outside (0, alpha/3)");
  if (sol.s_r * (alpha - sol.beta) != Rational(c, m))
    throw InternalConsistency("integer solution violates s_r (alpha - beta) = c/m");
  const auto [ell, d] = ell_d_from_slopes(sol.s_l_prime, sol.s_r, alpha, sol.beta);
  if (ell != Rational(sol.ell_prime) || d != Rational(sol.d_prime))
    throw InternalConsistency("closed-form (ell, d) disagrees with (c+m-1, c-m)");
  return sol;
}

struct ContainmentReport {
  bool passed = false;
  std::int64_t rows = 0;
  std::size_t corners_checked = 0;
  Rational scale;  // M / (alpha (ell'+3))
  Rational shift;  // M / (ell'+3)
  bool left_slope_ok = false;   // 1/s_l' >= alpha_l
  bool right_slope_ok = false;  // 1/s_r <= alpha_r
  std::optional<CornerViolation> violation;
  bool violation_beyond_rows = false;  // found by extrapolating past row K
  std::string message;
};

namespace detail {

// Corners of the extreme translates Y_{-k,k} and Y_{k,k} move affinely in k.
// Returns the first row beyond K where such a corner leaves the wedge.
inline std::optional<CornerViolation> extrapolated_violation(const YRegion& y00, std::int64_t K, const Wedge& w,
                                                             std::int64_t max_rows) {
  std::optional<std::int64_t> first;
  for (int side : {-1, 1}) {
    const YRegion one = y00.translate(side, 1);
    for (std::size_t i = 0; i < y00.parts.size(); ++i)
      for (std::size_t c = 0; c < 4; ++c) {
        const RationalPoint p0 = y00.parts[i].shape.corners[c];
        const RationalPoint p1 = one.parts[i].shape.corners[c];
        const Rational dx = p1.x - p0.x, dt = p1.t - p0.t;
        // Signed slack at row k is a + k b; a violation is slack < 0.
        Rational a, b;
        if (side > 0) {
          a = w.dx + w.M + w.alpha_r * (p0.t - w.dt) - p0.x;
          b = w.alpha_r * dt - dx;
        } else {
          a = p0.x - w.dx - w.alpha_l * (p0.t - w.dt);
          b = dx - w.alpha_l * dt;
        }
        if (!(b < 0)) continue;
        std::int64_t k = std::max<std::int64_t>(K + 1, (a / -b).floor() + 1);
        if (!first || k < *first) first = k;
      }
  }
  if (!first || *first > max_rows) return std::nullopt;
  for (std::int64_t k = *first; k <= *first + 1; ++k)
    for (std::int64_t j : {-k, k}) {
      const YRegion y = y00.translate(j, k);
      for (const auto& part : y.parts)
        for (int c = 0; c < 4; ++c) {
          const auto& pt = part.shape.corners[static_cast<std::size_t>(c)];
          if (!w.contains(pt.x, pt.t)) return CornerViolation{{j, k}, part.shape.label(), c, pt};
        }
    }
  return std::nullopt;
}

}  // namespace detail

// Checks Y(ell', d', M/(alpha(ell'+3))) inside W(alpha_l, alpha_r, M) - (M/(ell'+3), 0)
// corner by corner on rows k <= K, plus the slope inequalities that extend the
// finite check to every row. When a slope inequality fails, the first escaping
// corner beyond row K is located exactly and named.
inline ContainmentReport verify_containment(const IntegerSolution& sol, const Rational& alpha_l,
                                            const Rational& alpha_r, const Rational& M, std::int64_t K,
                                            std::int64_t max_rows = 100'000'000) {
  if (K < 0) throw InvalidArgument("rows must be non-negative");
  ContainmentReport rep;
  rep.rows = K;
  rep.scale = M / (sol.alpha * Rational(sol.ell_prime + 3));
  rep.shift = M / Rational(sol.ell_prime + 3);
  const Wedge target(alpha_l, alpha_r, M, -rep.shift, Rational(0));

  YRegion y;
  SlopePair s;
  try {
    y = detail::build_y(sol.ell_prime, sol.d_prime, rep.scale, sol.alpha, sol.beta, false);
    s = y_slopes(sol.ell_prime, sol.d_prime, sol.alpha, sol.beta);
  } catch (const std::exception& e) {
    rep.message = std::string("geometry rejected: ") + e.what();
    return rep;
  }
  rep.left_slope_ok = 1 / s.s_l >= alpha_l;
  rep.right_slope_ok = 1 / s.s_r <= alpha_r;
  rep.violation = first_corner_outside(y, K, target);
  if (!rep.violation && !(rep.left_slope_ok && rep.right_slope_ok)) {
    rep.violation = detail::extrapolated_violation(y, K, target, max_rows);
    rep.violation_beyond_rows = rep.violation.has_value();
  }
  const std::size_t translates = static_cast<std::size_t>((K + 1) * (K + 2) / 2);
  rep.corners_checked = translates * y.size() * 4;
  rep.passed = !rep.violation && rep.left_slope_ok && rep.right_slope_ok;
  if (rep.violation) {
    rep.message = "outside wedge: " + rep.violation->describe();
  } else if (!rep.passed) {
    rep.message = "slope inequality fails";
  } else {
    rep.message = "all corners inside";
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Crossing events and the percolation field.

namespace detail {

inline void check_fits(const EventTimeline& tl, const Parallelogram& p) {
  const SiteRange e = p.site_extent();
  if (!tl.window().contains(e.first) || !tl.window().contains(e.last))
    throw OutOfWindow(p.label() + " extends outside the timeline window");
  if (!le(ExactTime::from_rational(p.top_time()), ExactTime::from_double(tl.horizon())))
    throw OutOfWindow(p.label() + " extends beyond the timeline horizon");
}

}  // namespace detail

// Some bottom-edge site reaches the top edge by an active path inside p.
inline bool crossing_event(const EventTimeline& tl, const Parallelogram& p) {
  detail::check_fits(tl, p);
  const SiteRange bottom = p.bottom_sites();
  if (bottom.empty()) return false;
  EvolveOptions opts;
  opts.start = ExactTime::from_rational(p.bottom_time());
  opts.end = ExactTime::from_rational(p.top_time());
  opts.record = false;
  std::vector<Site> init;
  for (Site x = bottom.first; x <= bottom.last; ++x) init.push_back(x);
  const Trajectory traj = evolve(tl, p, Configuration::from_sites(std::move(init)), opts);
  return traj.survived();
}

// Crossing result per parallelogram of y, in stage order.
inline std::vector<bool> crossings(const EventTimeline& tl, const YRegion& y) {
  std::vector<bool> out;
  out.reserve(y.size());
  for (const auto& p : y.parts) out.push_back(crossing_event(tl, p.shape));
  return out;
}

inline bool o_event(const EventTimeline& tl, const YRegion& y) {
  for (const auto& p : y.parts)
    if (!crossing_event(tl, p.shape)) return false;
  return true;
}

// Timeline window and horizon needed to evaluate every Y_jk with k <= K.
struct FieldExtent {
  SiteRange sites;
  Rational top_time;
};

inline FieldExtent field_extent(const YRegion& y00, std::int64_t K) {
  FieldExtent f{y00.site_extent(), y00.top_time()};
  for (const auto& y : y_translates(y00, K)) {
    const SiteRange e = y.site_extent();
    f.sites.first = std::min(f.sites.first, e.first);
    f.sites.last = std::max(f.sites.last, e.last);
    f.top_time = max(f.top_time, y.top_time());
  }
  return f;
}

class PercolationField {
 public:
  PercolationField() : lattice_(0) {}
  explicit PercolationField(std::int64_t K) : lattice_(K), rows_(static_cast<std::size_t>(K + 1)) {
    for (std::int64_t k = 0; k <= K; ++k) rows_[static_cast<std::size_t>(k)].resize(lattice_.row_size(k));
  }

  const RenormLattice& lattice() const { return lattice_; }
  std::int64_t depth() const { return lattice_.depth(); }

  bool open(LatticePoint p) const { return cell(p).open; }
  void set(LatticePoint p, bool u, std::vector<bool> diagnostics = {}) {
    auto& c = cell(p);
    c.open = u;
    c.crossings = std::move(diagnostics);
  }
  const std::vector<bool>& crossings(LatticePoint p) const { return cell(p).crossings; }

 private:
  struct Cell {
    bool open = false;
    std::vector<bool> crossings;
  };
  Cell& cell(LatticePoint p) {
    if (!lattice_.contains(p)) throw OutOfWindow("lattice point outside the truncated lattice");
    return rows_[static_cast<std::size_t>(p.k)][RenormLattice::row_index(p)];
  }
  const Cell& cell(LatticePoint p) const { return const_cast<PercolationField*>(this)->cell(p); }

  RenormLattice lattice_;
  std::vector<std::vector<Cell>> rows_;
};

// U_jk = 1{O_jk} for every (j, k) with k <= K.
inline PercolationField percolation_field(const EventTimeline& tl, const YRegion& y00, std::int64_t K) {
  PercolationField field(K);
  for (const auto& p : field.lattice().points()) {
    const YRegion y = y00.translate(p.j, p.k);
    auto c = crossings(tl, y);
    const bool u = std::all_of(c.begin(), c.end(), [](bool b) { return b; });
    field.set(p, u, std::move(c));
  }
  return field;
}

// An open path from (0,0) reaching row K: U = 1 at every point before the
// last. With K = 0 the path is the single point (0,0), counted open iff U_00.
inline std::optional<std::vector<LatticePoint>> find_open_path(const PercolationField& field) {
  const std::int64_t K = field.depth();
  if (K == 0) {
    if (field.open({0, 0})) return std::vector<LatticePoint>{{0, 0}};
    return std::nullopt;
  }
  // parent[k][i]: row index in row k-1 that reached (k, i), or -1.
  std::vector<std::vector<std::int64_t>> parent(static_cast<std::size_t>(K + 1));
  parent[0] = {0};
  for (std::int64_t k = 1; k <= K; ++k) {
    auto& row = parent[static_cast<std::size_t>(k)];
    row.assign(static_cast<std::size_t>(k + 1), -1);
    const auto& prev = parent[static_cast<std::size_t>(k - 1)];
    for (std::int64_t i = 0; i < k; ++i) {
      if (prev[static_cast<std::size_t>(i)] < 0) continue;
      const LatticePoint p{2 * i - (k - 1), k - 1};
      if (!field.open(p)) continue;
      for (std::int64_t ni : {i, i + 1})
        if (row[static_cast<std::size_t>(ni)] < 0) row[static_cast<std::size_t>(ni)] = i;
    }
  }
  const auto& last = parent[static_cast<std::size_t>(K)];
  for (std::int64_t i = 0; i <= K; ++i) {
    if (last[static_cast<std::size_t>(i)] < 0) continue;
    std::vector<LatticePoint> path;
    std::int64_t idx = i;
    for (std::int64_t k = K; k >= 0; --k) {
      path.push_back({2 * idx - k, k});
      if (k > 0) idx = parent[static_cast<std::size_t>(k)][static_cast<std::size_t>(idx)];
    }
    std::reverse(path.begin(), path.end());
    return path;
  }
  return std::nullopt;
}

inline bool open_path_exists(const PercolationField& field) { return find_open_path(field).has_value(); }

// Whether the bottom edge of the first region of `path` reaches the top edge of
// every parallelogram of the last open region (the second to last point, or the
// only point when the path has length one) by active paths inside the union of
// the visited regions. Consecutive regions overlap by crossing, so the top edges
// of the last open region are the natural endpoint of such a path.
inline bool graphical_path_along(const EventTimeline& tl, const YRegion& y00, const std::vector<LatticePoint>& path) {
  if (path.empty()) throw InvalidArgument("empty lattice path");
  ParallelogramUnion region;
  for (const auto& p : path) {
    const YRegion y = y00.translate(p.j, p.k);
    for (const auto& part : y.parts) region.parts.push_back(part.shape);
  }
  const YRegion first = y00.translate(path.front().j, path.front().k);
  const LatticePoint& end = path.size() > 1 ? path[path.size() - 2] : path.back();
  const YRegion last = y00.translate(end.j, end.k);
  std::vector<Site> sources;
  const SiteRange b0 = first.base().bottom_sites();
  for (Site x = b0.first; x <= b0.last; ++x) sources.push_back(x);
  for (const auto& part : last.parts) {
    const auto reached = reachable_sites(tl, region, sources, ExactTime::from_rational(first.bottom_time()),
                                         ExactTime::from_rational(part.shape.top_time()));
    const SiteRange top = part.shape.top_sites();
    if (std::none_of(reached.begin(), reached.end(), [&](Site x) { return top.first <= x && x <= top.last; }))
      return false;
  }
  return true;
}

}  // namespace wedgecp
