#pragma once

// Grass-bushes-trees process: 0 grass, 1 bushes, 2 trees. Driven either by a
// labeled timeline (1-only arrows carry bushes but not trees) or directly by
// a jump-chain simulation of the transition rates.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <vector>

#include "wedgecp/contact.hpp"
#include "wedgecp/errors.hpp"
#include "wedgecp/rng.hpp"
#include "wedgecp/timeline.hpp"

namespace wedgecp {

class GbtConfiguration {
 public:
  GbtConfiguration() = default;

  static GbtConfiguration from_states(const std::map<Site, std::uint8_t>& states) {
    GbtConfiguration c;
    for (const auto& [x, s] : states) c.set(x, s);
    return c;
  }

  // 2's on x < origin, a 1 at origin, 0 to the right.
  static GbtConfiguration trees_left_bush_at(Site origin) {
    GbtConfiguration c;
    c.left_ = Tail{origin - 1, 2};
    c.set(origin, 1);
    return c;
  }

  GbtConfiguration& set(Site x, std::uint8_t state) {
    if (state > 2) throw InvalidArgument("GBT states are 0, 1 or 2");
    if (state == 0) {
      sites_.erase(x);
    } else {
      sites_[x] = state;
    }
    return *this;
  }
  GbtConfiguration& with_left_tail(Site last, std::uint8_t state) {
    if (state > 2) throw InvalidArgument("GBT states are 0, 1 or 2");
    left_ = Tail{last, state};
    return *this;
  }
  GbtConfiguration& with_right_tail(Site first, std::uint8_t state) {
    if (state > 2) throw InvalidArgument("GBT states are 0, 1 or 2");
    right_ = Tail{first, state};
    return *this;
  }

  bool cofinite_left() const { return left_ && left_->state != 0; }
  bool cofinite_right() const { return right_ && right_->state != 0; }

  std::uint8_t at(Site x) const {
    if (auto it = sites_.find(x); it != sites_.end()) return it->second;
    if (left_ && x <= left_->edge) return left_->state;
    if (right_ && x >= right_->edge) return right_->state;
    return 0;
  }

  // Dense states over the window.
  std::vector<std::uint8_t> clip(SiteWindow w) const {
    std::vector<std::uint8_t> out(w.size(), 0);
    for (Site x = w.first; x <= w.last; ++x) out[static_cast<std::size_t>(x - w.first)] = at(x);
    return out;
  }

 private:
  struct Tail {
    Site edge;
    std::uint8_t state;
  };
  std::map<Site, std::uint8_t> sites_;
  std::optional<Tail> left_;
  std::optional<Tail> right_;
};

struct GbtCounts {
  double t = 0.0;
  std::size_t ones = 0;
  std::size_t twos = 0;
};

class GbtTrajectory {
 public:
  SiteWindow window;
  std::vector<std::uint8_t> initial;  // dense over the window
  double start = 0.0;
  double end = 0.0;
  std::vector<StateChange> changes;
  std::vector<GbtCounts> counts;  // after the initial state and after every change
  std::vector<std::uint8_t> final_state;
  bool cofinite_left = false;
  bool cofinite_right = false;
  bool touched_left = false;
  bool touched_right = false;
  bool recorded = true;

  bool edge_touched() const {
    return (touched_left && !cofinite_left) || (touched_right && !cofinite_right);
  }

  std::vector<std::uint8_t> state_at(double t) const {
    if (!recorded) throw InvalidArgument("trajectory was evolved without a change log");
    auto s = initial;
    for (const auto& c : changes) {
      if (c.t > t) break;
      s[static_cast<std::size_t>(c.x - window.first)] = c.state;
    }
    return s;
  }

  std::vector<Site> sites_in_state(std::uint8_t state) const { return sites_with(final_state, state); }

  std::vector<Site> sites_with(const std::vector<std::uint8_t>& dense, std::uint8_t state) const {
    std::vector<Site> out;
    for (std::size_t i = 0; i < dense.size(); ++i)
      if (dense[i] == state) out.push_back(window.first + static_cast<Site>(i));
    return out;
  }

  std::size_t final_count(std::uint8_t state) const {
    return static_cast<std::size_t>(std::count(final_state.begin(), final_state.end(), state));
  }
};

struct GbtOptions {
  std::optional<double> end;  // default: timeline horizon
  bool record = true;
};

namespace detail {

inline void gbt_count(std::vector<GbtCounts>& counts, double t, std::uint8_t from, std::uint8_t to) {
  GbtCounts c = counts.back();
  c.t = t;
  if (from == 1) --c.ones;
  if (from == 2) --c.twos;
  if (to == 1) ++c.ones;
  if (to == 2) ++c.twos;
  counts.push_back(c);
}

inline GbtTrajectory gbt_start(SiteWindow w, const GbtConfiguration& initial, double end, bool record) {
  GbtTrajectory traj;
  traj.window = w;
  traj.initial = initial.clip(w);
  traj.end = end;
  traj.cofinite_left = initial.cofinite_left();
  traj.cofinite_right = initial.cofinite_right();
  traj.recorded = record;
  GbtCounts c;
  for (auto s : traj.initial) {
    if (s == 1) ++c.ones;
    if (s == 2) ++c.twos;
  }
  traj.counts.push_back(c);
  return traj;
}

}  // namespace detail

// Graphical construction. The timeline must carry rate lambda1 arrows labeled
// 1-only with probability (lambda1 - lambda2) / lambda1.
inline GbtTrajectory evolve_gbt(const EventTimeline& tl, double lambda1, double lambda2,
                                const GbtConfiguration& initial, const GbtOptions& opts = {}) {
  if (!(lambda1 > lambda2 && lambda2 > 0.0)) throw InvalidArgument("GBT requires lambda1 > lambda2 > 0");
  if (std::fabs(tl.lambda() - lambda1) > 1e-12)
    throw InvalidArgument("timeline arrow rate differs from lambda1");
  if (std::fabs(tl.one_only_prob() - (lambda1 - lambda2) / lambda1) > 1e-12)
    throw InvalidArgument("timeline 1-only probability differs from (lambda1 - lambda2) / lambda1");
  const double end = opts.end.value_or(tl.horizon());
  if (end > tl.horizon() || end < 0.0) throw OutOfWindow("evolution end outside [0, horizon]");

  const SiteWindow w = tl.window();
  GbtTrajectory traj = detail::gbt_start(w, initial, end, opts.record);
  std::vector<std::uint8_t> state = traj.initial;
  std::vector<std::uint32_t> epoch(w.size(), 0);
  detail::PendingQueue queue;
  auto at = [&](Site x) { return static_cast<std::size_t>(x - w.first); };

  auto occupy = [&](Site x, double t, bool from_zero) {
    const std::uint32_t ep = ++epoch[at(x)];
    if (x == w.first) traj.touched_left = true;
    if (x == w.last) traj.touched_right = true;
    auto deaths = tl.deaths(x);
    auto d = from_zero ? std::lower_bound(deaths.begin(), deaths.end(), t)
                       : std::upper_bound(deaths.begin(), deaths.end(), t);
    if (d != deaths.end()) queue.push({*d, 1, 0, ep, x, 0});
    for (Direction dir : {Direction::kLeft, Direction::kRight}) {
      auto arrows = tl.arrows(x, dir);
      auto a = from_zero ? std::lower_bound(arrows.begin(), arrows.end(), t)
                         : std::upper_bound(arrows.begin(), arrows.end(), t);
      if (a != arrows.end())
        queue.push({*a, 2, static_cast<std::int8_t>(dir), ep, x, static_cast<std::uint32_t>(a - arrows.begin())});
    }
  };
  auto change = [&](Site x, double t, std::uint8_t to) {
    const std::uint8_t from = state[at(x)];
    state[at(x)] = to;
    if (!opts.record) return;
    traj.changes.push_back({t, x, to});
    detail::gbt_count(traj.counts, t, from, to);
  };

  for (Site x = w.first; x <= w.last; ++x)
    if (state[at(x)]) occupy(x, 0.0, true);

  while (!queue.empty()) {
    const detail::Pending ev = queue.top();
    if (ev.t > end) break;
    queue.pop();
    const std::size_t i = at(ev.x);
    if (!state[i] || epoch[i] != ev.epoch) continue;
    if (ev.kind == 1) {
      change(ev.x, ev.t, 0);
      continue;
    }
    const auto dir = static_cast<Direction>(ev.dir);
    auto arrows = tl.arrows(ev.x, dir);
    if (ev.index + 1 < arrows.size()) queue.push({arrows[ev.index + 1], 2, ev.dir, ev.epoch, ev.x, ev.index + 1});
    const Site y = target(ev.x, dir);
    const std::uint8_t sy = state[at(y)];
    const bool one_only = tl.labels(ev.x, dir)[ev.index] != 0;
    if (state[i] == 2 && !one_only && sy != 2) {
      change(y, ev.t, 2);
      if (sy == 0) occupy(y, ev.t, false);
    } else if (state[i] == 1 && sy == 0) {
      change(y, ev.t, 1);
      occupy(y, ev.t, false);
    }
  }
  traj.final_state = std::move(state);
  return traj;
}

// Jump-chain simulation of the rates: a 1 or 2 dies at rate 1, a 0 becomes 1
// at rate lambda1 * (#neighbouring 1's), a 0 or 1 becomes 2 at rate
// lambda2 * (#neighbouring 2's). Neighbours outside the window do not exist.
inline GbtTrajectory evolve_gbt_direct(double lambda1, double lambda2, const GbtConfiguration& initial,
                                       double horizon, SeedKey seed, SiteWindow window, bool record = true) {
  if (!(lambda1 >= 0.0 && lambda2 >= 0.0)) throw InvalidArgument("GBT rates must be non-negative");
  if (!(horizon > 0.0) || window.empty()) throw InvalidArgument("horizon must be positive and window nonempty");
  GbtTrajectory traj = detail::gbt_start(window, initial, horizon, record);
  std::vector<std::uint8_t> state = traj.initial;
  const std::size_t n = state.size();
  RandomStream rng(seed, StreamKind::kGeneric, 0);
  std::vector<double> rate(n);

  auto neighbours = [&](std::size_t i, std::uint8_t s) {
    int c = 0;
    if (i > 0 && state[i - 1] == s) ++c;
    if (i + 1 < n && state[i + 1] == s) ++c;
    return c;
  };
  auto site_rate = [&](std::size_t i) {
    switch (state[i]) {
      case 0: return lambda1 * neighbours(i, 1) + lambda2 * neighbours(i, 2);
      case 1: return 1.0 + lambda2 * neighbours(i, 2);
      default: return 1.0;
    }
  };

  double t = 0.0;
  for (;;) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += rate[i] = site_rate(i);
    if (total <= 0.0) break;
    t += rng.exponential(total);
    if (t > horizon) break;
    double u = rng.uniform() * total;
    std::size_t i = 0;
    while (i + 1 < n && u >= rate[i]) u -= rate[i++];
    std::uint8_t to = 0;
    if (state[i] == 0) {
      to = u < lambda1 * neighbours(i, 1) ? 1 : 2;
    } else if (state[i] == 1) {
      to = u < 1.0 ? 0 : 2;
    }
    const std::uint8_t from = state[i];
    state[i] = to;
    const Site x = window.first + static_cast<Site>(i);
    if (to && x == window.first) traj.touched_left = true;
    if (to && x == window.last) traj.touched_right = true;
    if (record) {
      traj.changes.push_back({t, x, to});
      detail::gbt_count(traj.counts, t, from, to);
    }
  }
  traj.final_state = std::move(state);
  return traj;
}

}  // namespace wedgecp
