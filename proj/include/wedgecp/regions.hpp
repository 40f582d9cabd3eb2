#pragma once

// Space-time regions with exact-rational linear boundaries. All boundaries are
// closed. For simulation a region is consumed per site: the set of times at
// which site x belongs to the region is a finite union of closed intervals,
// computed exactly and then placed on the double line with ExactTime.

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wedgecp/errors.hpp"
#include "wedgecp/rational.hpp"
#include "wedgecp/timeline.hpp"

namespace wedgecp {

using SiteRange = SiteWindow;

struct RationalPoint {
  Rational x;
  Rational t;
  friend bool operator==(const RationalPoint&, const RationalPoint&) = default;
};

// Closed time interval [lo, hi]; hi absent means unbounded above.
struct TimeInterval {
  Rational lo;
  std::optional<Rational> hi;

  bool contains(const Rational& t) const { return lo <= t && (!hi || t <= *hi); }
  bool contains(double t) const {
    return ge(t, ExactTime::from_rational(lo)) && (!hi || le(t, ExactTime::from_rational(*hi)));
  }
  friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

using IntervalList = std::vector<TimeInterval>;

struct FullSpace {};

// {(x,t): t >= dt, alpha_l (t-dt) <= x-dx <= M + alpha_r (t-dt)}
struct Wedge {
  Rational alpha_l;
  Rational alpha_r;
  Rational M;
  Rational dx{0};
  Rational dt{0};

  Wedge() = default;
  Wedge(Rational al, Rational ar, Rational m, Rational offset_x = 0, Rational offset_t = 0)
      : alpha_l(al), alpha_r(ar), M(m), dx(offset_x), dt(offset_t) {
    if (!(Rational(0) < alpha_l && alpha_l < alpha_r))
      throw InvalidArgument("wedge speeds must satisfy 0 < alpha_l < alpha_r");
    if (M < 0) throw InvalidArgument("wedge width M must be non-negative");
  }

  bool contains(const Rational& x, const Rational& t) const {
    if (t < dt || t < 0) return false;
    const Rational u = x - dx;
    const Rational s = t - dt;
    return alpha_l * s <= u && u <= M + alpha_r * s;
  }

  IntervalList site_intervals(Site x) const {
    const Rational u = Rational(x) - dx;
    Rational lo = max(dt, dt + (u - M) / alpha_r);
    lo = max(lo, Rational(0));
    const Rational hi = dt + u / alpha_l;
    if (hi < lo) return {};
    return {TimeInterval{lo, hi}};
  }
};

// {(x,t): t >= 0, x <= M + alpha_r t}
struct HalfSpace {
  Rational alpha_r;
  Rational M;

  HalfSpace() = default;
  HalfSpace(Rational ar, Rational m) : alpha_r(ar), M(m) {
    if (!(Rational(0) < alpha_r)) throw InvalidArgument("half-space speed must be positive");
  }

  bool contains(const Rational& x, const Rational& t) const { return t >= 0 && x <= M + alpha_r * t; }

  IntervalList site_intervals(Site x) const {
    return {TimeInterval{max(Rational(0), (Rational(x) - M) / alpha_r), std::nullopt}};
  }
};

enum class ParallelogramKind { kL, kR, kLSmall, kRSmall };

inline const char* kind_name(ParallelogramKind k) {
  switch (k) {
    case ParallelogramKind::kL: return "L";
    case ParallelogramKind::kR: return "R";
    case ParallelogramKind::kLSmall: return "L_small";
    case ParallelogramKind::kRSmall: return "R_small";
  }
  return "?";
}

inline ParallelogramKind parse_kind(const std::string& s) {
  if (s == "L") return ParallelogramKind::kL;
  if (s == "R") return ParallelogramKind::kR;
  if (s == "L_small") return ParallelogramKind::kLSmall;
  if (s == "R_small") return ParallelogramKind::kRSmall;
  throw InvalidArgument("unknown parallelogram kind '" + s + "'");
}

inline bool is_left(ParallelogramKind k) { return k == ParallelogramKind::kL || k == ParallelogramKind::kLSmall; }
inline bool is_small(ParallelogramKind k) {
  return k == ParallelogramKind::kLSmall || k == ParallelogramKind::kRSmall;
}

// Translate by M(j(alpha-beta), k) of the base slab
//   L: M beta/2 <= x + alpha t <= 3 M beta/2
//   R: -3 M beta/2 <= x - alpha t <= -M beta/2
// with t in [0, M(1+beta/alpha)] (large) or [0, 3 M beta/(2 alpha)] (small).
struct Parallelogram {
  ParallelogramKind kind = ParallelogramKind::kL;
  std::int64_t j = 0;
  std::int64_t k = 0;
  Rational M;
  Rational alpha;
  Rational beta;

  Rational offset_x;
  Rational offset_t;
  Rational height;
  // bottom-left, bottom-right, top-right, top-left
  std::array<RationalPoint, 4> corners;

  Rational bottom_time() const { return offset_t; }
  Rational top_time() const { return offset_t + height; }

  // Integer sites on the bottom and top edges.
  SiteRange bottom_sites() const { return {corners[0].x.ceil(), corners[1].x.floor()}; }
  SiteRange top_sites() const { return {corners[3].x.ceil(), corners[2].x.floor()}; }

  // Integer sites ever inside the parallelogram.
  SiteRange site_extent() const {
    Rational lo = corners[0].x, hi = corners[0].x;
    for (const auto& c : corners) {
      lo = min(lo, c.x);
      hi = max(hi, c.x);
    }
    return {lo.ceil(), hi.floor()};
  }

  bool contains(const Rational& x, const Rational& t) const {
    const Rational s = t - offset_t;
    if (s < 0 || s > height) return false;
    const Rational u = x - offset_x;
    const Rational half = M * beta / 2;
    if (is_left(kind)) {
      const Rational v = u + alpha * s;
      return half <= v && v <= 3 * half;
    }
    const Rational v = u - alpha * s;
    return -3 * half <= v && v <= -half;
  }

  IntervalList site_intervals(Site x) const {
    const Rational u = Rational(x) - offset_x;
    const Rational half = M * beta / 2;
    Rational lo, hi;
    if (is_left(kind)) {
      lo = (half - u) / alpha;
      hi = (3 * half - u) / alpha;
    } else {
      lo = (u + half) / alpha;
      hi = (u + 3 * half) / alpha;
    }
    lo = max(lo, Rational(0));
    hi = min(hi, height);
    if (hi < lo) return {};
    return {TimeInterval{lo + offset_t, hi + offset_t}};
  }

  // Geometry without the integrality precondition on M beta/2 and M alpha.
  static Parallelogram geometry(ParallelogramKind kind, std::int64_t j, std::int64_t k, Rational M, Rational alpha,
                                Rational beta) {
    if (k < 0 || (j + k) % 2 != 0) throw InvalidArgument("parallelogram index needs k >= 0 and j+k even");
    if (!(Rational(0) < beta && beta * 3 < alpha)) throw InvalidArgument("need 0 < beta < alpha/3");
    if (!(M > 0)) throw InvalidArgument("parallelogram scale M must be positive");
    Parallelogram p;
    p.kind = kind;
    p.j = j;
    p.k = k;
    p.M = M;
    p.alpha = alpha;
    p.beta = beta;
    p.offset_x = M * Rational(j) * (alpha - beta);
    p.offset_t = M * Rational(k);
    p.height = is_small(kind) ? M * 3 * beta / (2 * alpha) : M * (1 + beta / alpha);
    const Rational half = M * beta / 2;
    Rational b0, b1;  // bottom edge, relative to offset
    Rational shift;   // top edge displacement
    if (is_left(kind)) {
      b0 = half;
      b1 = 3 * half;
      shift = -alpha * p.height;
    } else {
      b0 = -3 * half;
      b1 = -half;
      shift = alpha * p.height;
    }
    const Rational top = p.offset_t + p.height;
    p.corners = {RationalPoint{p.offset_x + b0, p.offset_t}, RationalPoint{p.offset_x + b1, p.offset_t},
                 RationalPoint{p.offset_x + b1 + shift, top}, RationalPoint{p.offset_x + b0 + shift, top}};
    return p;
  }

  std::string label() const {
    return std::string(kind_name(kind)) + "(" + std::to_string(j) + "," + std::to_string(k) + ")";
  }
};

// Checked constructor: also requires M beta/2 and M alpha to be integers so
// that edges fall on lattice sites.
inline Parallelogram make_parallelogram(ParallelogramKind kind, std::int64_t j, std::int64_t k, Rational M,
                                        Rational alpha, Rational beta) {
  if (!(M * beta / 2).is_integer() || !(M * alpha).is_integer())
    throw InvalidArgument("parallelogram needs M*beta/2 and M*alpha integral");
  return Parallelogram::geometry(kind, j, k, M, alpha, beta);
}

// Merge closed intervals into a sorted disjoint list.
inline IntervalList merge_intervals(IntervalList v) {
  std::sort(v.begin(), v.end(), [](const TimeInterval& a, const TimeInterval& b) { return a.lo < b.lo; });
  IntervalList out;
  for (auto& iv : v) {
    if (!out.empty() && (!out.back().hi || iv.lo <= *out.back().hi)) {
      auto& back = out.back();
      if (back.hi && (!iv.hi || *back.hi < *iv.hi)) back.hi = iv.hi;
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

struct ParallelogramUnion {
  std::vector<Parallelogram> parts;

  bool contains(const Rational& x, const Rational& t) const {
    return std::any_of(parts.begin(), parts.end(), [&](const Parallelogram& p) { return p.contains(x, t); });
  }

  IntervalList site_intervals(Site x) const {
    IntervalList all;
    for (const auto& p : parts) {
      auto iv = p.site_intervals(x);
      all.insert(all.end(), iv.begin(), iv.end());
    }
    return merge_intervals(std::move(all));
  }
};

using Region = std::variant<FullSpace, Wedge, HalfSpace, Parallelogram, ParallelogramUnion>;

inline bool contains(const Region& region, const Rational& x, const Rational& t) {
  return std::visit(
      [&](const auto& r) -> bool {
        if constexpr (std::is_same_v<std::decay_t<decltype(r)>, FullSpace>) {
          return t >= 0;
        } else {
          return r.contains(x, t);
        }
      },
      region);
}

inline IntervalList site_intervals(const Region& region, Site x) {
  return std::visit(
      [&](const auto& r) -> IntervalList {
        if constexpr (std::is_same_v<std::decay_t<decltype(r)>, FullSpace>) {
          return {TimeInterval{Rational(0), std::nullopt}};
        } else {
          return r.site_intervals(x);
        }
      },
      region);
}

// Exact membership of a site at a floating-point time.
inline bool contains(const Region& region, Site x, double t) {
  for (const auto& iv : site_intervals(region, x))
    if (iv.contains(t)) return true;
  return false;
}

inline bool region_membership(const Region& region, const SpaceTimePoint& p) { return contains(region, p.x, p.t); }

// Integer sites the region can ever contain for t in [0, horizon]; nullopt if
// unbounded.
inline std::optional<SiteRange> site_extent(const Region& region, const Rational& horizon) {
  return std::visit(
      [&](const auto& r) -> std::optional<SiteRange> {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, FullSpace> || std::is_same_v<T, HalfSpace>) {
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, Wedge>) {
          const Rational span = max(horizon - r.dt, Rational(0));
          return SiteRange{r.dx.ceil(), (r.dx + r.M + r.alpha_r * span).floor()};
        } else if constexpr (std::is_same_v<T, Parallelogram>) {
          return r.site_extent();
        } else {
          if (r.parts.empty()) return SiteRange{0, -1};
          SiteRange out = r.parts.front().site_extent();
          for (const auto& p : r.parts) {
            const SiteRange e = p.site_extent();
            out.first = std::min(out.first, e.first);
            out.last = std::max(out.last, e.last);
          }
          return out;
        }
      },
      region);
}

// ---------------------------------------------------------------------------
// JSON: {type, parameters as exact rational strings}

inline nlohmann::ordered_json parallelogram_json(const Parallelogram& p) {
  nlohmann::ordered_json j;
  j["type"] = "parallelogram";
  j["kind"] = kind_name(p.kind);
  j["j"] = p.j;
  j["k"] = p.k;
  j["M"] = p.M.str();
  j["alpha"] = p.alpha.str();
  j["beta"] = p.beta.str();
  return j;
}

inline nlohmann::ordered_json region_to_json(const Region& region) {
  return std::visit(
      [](const auto& r) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(r)>;
        nlohmann::ordered_json j;
        if constexpr (std::is_same_v<T, FullSpace>) {
          j["type"] = "full";
        } else if constexpr (std::is_same_v<T, Wedge>) {
          j["type"] = "wedge";
          j["alpha_l"] = r.alpha_l.str();
          j["alpha_r"] = r.alpha_r.str();
          j["M"] = r.M.str();
          j["dx"] = r.dx.str();
          j["dt"] = r.dt.str();
        } else if constexpr (std::is_same_v<T, HalfSpace>) {
          j["type"] = "half_space";
          j["alpha_r"] = r.alpha_r.str();
          j["M"] = r.M.str();
        } else if constexpr (std::is_same_v<T, Parallelogram>) {
          j = parallelogram_json(r);
        } else {
          j["type"] = "union";
          j["parts"] = nlohmann::ordered_json::array();
          for (const auto& p : r.parts) j["parts"].push_back(parallelogram_json(p));
        }
        return j;
      },
      region);
}

inline Region region_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  auto rat = [&](const char* key) { return Rational::parse(j.at(key).get<std::string>()); };
  if (type == "full") return FullSpace{};
  if (type == "wedge") {
    return Wedge(rat("alpha_l"), rat("alpha_r"), rat("M"), j.contains("dx") ? rat("dx") : Rational(0),
                 j.contains("dt") ? rat("dt") : Rational(0));
  }
  if (type == "half_space") return HalfSpace(rat("alpha_r"), rat("M"));
  if (type == "parallelogram") {
    return Parallelogram::geometry(parse_kind(j.at("kind").get<std::string>()), j.at("j").get<std::int64_t>(),
                                   j.at("k").get<std::int64_t>(), rat("M"), rat("alpha"), rat("beta"));
  }
  if (type == "union") {
    ParallelogramUnion u;
    for (const auto& part : j.at("parts")) u.parts.push_back(std::get<Parallelogram>(region_from_json(part)));
    return u;
  }
  throw InvalidArgument("unknown region type '" + type + "'");
}

}  // namespace wedgecp
