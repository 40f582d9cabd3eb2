#pragma once

// Restricted and unrestricted contact processes driven by an EventTimeline.
//
// Evolution is event driven over occupied sites only: each occupied site keeps
// its next death, its next arrow in each direction, and (for bounded region
// intervals) its region-exit instant in a priority queue. Entries carry an
// occupation epoch so that stale entries are skipped when popped.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <vector>

#include "wedgecp/errors.hpp"
#include "wedgecp/parallel.hpp"
#include "wedgecp/regions.hpp"
#include "wedgecp/rng.hpp"
#include "wedgecp/schedule.hpp"
#include "wedgecp/stats.hpp"
#include "wedgecp/timeline.hpp"

namespace wedgecp {

// A set of occupied sites: a finite part plus optional infinite tails
// (-inf, left_end] and [right_start, +inf), used for initial states such as Z,
// Z^- and half-lines. Tails are materialized only by clipping to a window.
class Configuration {
 public:
  Configuration() = default;

  static Configuration from_sites(std::vector<Site> sites) {
    Configuration c;
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    c.sites_ = std::move(sites);
    return c;
  }
  static Configuration single(Site x) { return from_sites({x}); }
  static Configuration interval(Site a, Site b) {
    std::vector<Site> v;
    for (Site x = a; x <= b; ++x) v.push_back(x);
    return from_sites(std::move(v));
  }
  static Configuration left_half_line(Site last) {
    Configuration c;
    c.left_end_ = last;
    return c;
  }
  static Configuration right_half_line(Site first) {
    Configuration c;
    c.right_start_ = first;
    return c;
  }
  static Configuration all() {
    Configuration c;
    c.left_end_ = 0;
    c.right_start_ = 1;
    return c;
  }

  bool cofinite_left() const { return left_end_.has_value(); }
  bool cofinite_right() const { return right_start_.has_value(); }
  bool finite() const { return !cofinite_left() && !cofinite_right(); }
  bool empty() const { return finite() && sites_.empty(); }
  const std::vector<Site>& sites() const { return sites_; }

  bool contains(Site x) const {
    if (left_end_ && x <= *left_end_) return true;
    if (right_start_ && x >= *right_start_) return true;
    return std::binary_search(sites_.begin(), sites_.end(), x);
  }

  std::vector<Site> clip(SiteWindow w) const {
    std::vector<Site> out;
    if (finite()) {
      for (Site x : sites_)
        if (w.contains(x)) out.push_back(x);
      return out;
    }
    for (Site x = w.first; x <= w.last; ++x)
      if (contains(x)) out.push_back(x);
    return out;
  }

 private:
  std::vector<Site> sites_;
  std::optional<Site> left_end_;
  std::optional<Site> right_start_;
};

struct StateChange {
  double t = 0.0;
  Site x = 0;
  std::uint8_t state = 0;
};

class Trajectory {
 public:
  SiteWindow window;
  std::vector<Site> initial;
  ExactTime start;
  ExactTime end;
  std::vector<StateChange> changes;  // empty when recording was disabled
  std::vector<Site> final_sites;
  std::shared_ptr<const Region> region;
  bool cofinite_left = false;
  bool cofinite_right = false;
  bool touched_left = false;   // an occupied site sat on the left window edge
  bool touched_right = false;  // ... on the right window edge
  bool recorded = true;

  // Touching only counts on sides where the initial state was not clipped
  // from an infinite tail.
  bool edge_touched() const {
    return (touched_left && !cofinite_left) || (touched_right && !cofinite_right);
  }
  bool survived() const { return !final_sites.empty(); }

  // Occupied sites after all changes at times <= t.
  std::vector<Site> state_at(double t) const { return state_until([&](double c) { return c <= t; }); }
  std::vector<Site> state_at(const ExactTime& t) const { return state_until([&](double c) { return le(c, t); }); }

 private:
  template <class Pred>
  std::vector<Site> state_until(Pred include) const {
    if (!recorded) throw InvalidArgument("trajectory was evolved without a change log");
    std::vector<std::uint8_t> occ(window.size(), 0);
    for (Site x : initial) occ[static_cast<std::size_t>(x - window.first)] = 1;
    for (const auto& c : changes) {
      if (!include(c.t)) break;
      occ[static_cast<std::size_t>(c.x - window.first)] = c.state;
    }
    std::vector<Site> out;
    for (std::size_t i = 0; i < occ.size(); ++i)
      if (occ[i]) out.push_back(window.first + static_cast<Site>(i));
    return out;
  }
};

struct EvolveOptions {
  std::optional<ExactTime> start;  // default 0
  std::optional<ExactTime> end;    // default: timeline horizon
  bool record = true;              // keep the change log
};

namespace detail {

struct Pending {
  double t;
  std::uint8_t kind;  // 0 region exit, 1 death, 2 arrow
  std::int8_t dir;
  std::uint32_t epoch;
  Site x;
  std::uint32_t index;  // position in the arrow stream

  friend bool operator>(const Pending& a, const Pending& b) {
    if (a.t != b.t) return a.t > b.t;
    if (a.kind != b.kind) return a.kind > b.kind;
    if (a.x != b.x) return a.x > b.x;
    return a.dir > b.dir;
  }
};

using PendingQueue = std::priority_queue<Pending, std::vector<Pending>, std::greater<>>;

}  // namespace detail

// Restricted contact process: deaths clear a site; an arrow x->y at time t
// occupies y iff x is occupied, y is empty and both (x,t), (y,t) lie in the
// region; a site is cleared the instant it leaves the region.
inline Trajectory evolve(const EventTimeline& tl, const Region& region, const Configuration& initial,
                         const EvolveOptions& opts = {}) {
  const SiteWindow w = tl.window();
  const ExactTime start = opts.start.value_or(ExactTime::from_double(0.0));
  const ExactTime end = opts.end.value_or(ExactTime::from_double(tl.horizon()));
  if (!le(end, ExactTime::from_double(tl.horizon()))) throw OutOfWindow("evolution end beyond timeline horizon");
  if (!le(start, end)) throw InvalidArgument("evolution start after end");

  Trajectory traj;
  traj.window = w;
  traj.start = start;
  traj.end = end;
  traj.region = std::make_shared<const Region>(region);
  traj.cofinite_left = initial.cofinite_left();
  traj.cofinite_right = initial.cofinite_right();
  traj.recorded = opts.record;
  traj.initial = initial.clip(w);

  RegionSchedule schedule(region, w);
  for (Site x : traj.initial)
    if (!schedule.find(x, start)) throw InvalidArgument("initial site " + std::to_string(x) + " outside region");

  const std::size_t n = w.size();
  std::vector<std::uint8_t> occ(n, 0);
  std::vector<std::uint32_t> epoch(n, 0);
  detail::PendingQueue queue;
  auto at = [&](Site x) { return static_cast<std::size_t>(x - w.first); };

  auto occupy = [&](Site x, double t, bool initial_state) {
    const std::size_t i = at(x);
    occ[i] = 1;
    const std::uint32_t ep = ++epoch[i];
    if (x == w.first) traj.touched_left = true;
    if (x == w.last) traj.touched_right = true;

    auto deaths = tl.deaths(x);
    auto d = initial_state ? std::find_if(deaths.begin(), deaths.end(), [&](double v) { return ge(v, start); })
                           : std::upper_bound(deaths.begin(), deaths.end(), t);
    if (d != deaths.end()) queue.push({*d, 1, 0, ep, x, 0});
    for (Direction dir : {Direction::kLeft, Direction::kRight}) {
      auto arrows = tl.arrows(x, dir);
      auto a = initial_state ? std::find_if(arrows.begin(), arrows.end(), [&](double v) { return ge(v, start); })
                             : std::upper_bound(arrows.begin(), arrows.end(), t);
      if (a != arrows.end())
        queue.push({*a, 2, static_cast<std::int8_t>(dir), ep, x, static_cast<std::uint32_t>(a - arrows.begin())});
    }
    const RegionSchedule::Slot* slot = initial_state ? schedule.find(x, start) : schedule.find(x, t);
    if (slot && !slot->hi.is_infinite()) queue.push({slot->hi.strictly_after(), 0, 0, ep, x, 0});
  };
  auto record = [&](double t, Site x, std::uint8_t s) {
    if (opts.record) traj.changes.push_back({t, x, s});
  };

  for (Site x : traj.initial) occupy(x, start.down, true);

  while (!queue.empty()) {
    const detail::Pending ev = queue.top();
    if (gt(ev.t, end)) break;
    queue.pop();
    const std::size_t i = at(ev.x);
    if (!occ[i] || epoch[i] != ev.epoch) continue;
    if (ev.kind != 2) {  // death or region exit
      occ[i] = 0;
      record(ev.t, ev.x, 0);
      continue;
    }
    const auto dir = static_cast<Direction>(ev.dir);
    auto arrows = tl.arrows(ev.x, dir);
    if (ev.index + 1 < arrows.size()) queue.push({arrows[ev.index + 1], 2, ev.dir, ev.epoch, ev.x, ev.index + 1});
    const Site y = target(ev.x, dir);
    if (occ[at(y)]) continue;
    if (!schedule.find(y, ev.t) || !schedule.find(ev.x, ev.t)) continue;
    occupy(y, ev.t, false);
    record(ev.t, y, 1);
  }

  for (std::size_t i = 0; i < n; ++i)
    if (occ[i]) traj.final_sites.push_back(w.first + static_cast<Site>(i));
  return traj;
}

struct EdgeSample {
  double t = 0.0;
  bool defined = false;  // false while the configuration is empty
  Site l = 0;
  Site r = 0;
};

struct EdgePath {
  std::vector<EdgeSample> samples;

  // Sample in force at time t (the last one at or before t).
  const EdgeSample* at(double t) const {
    auto it = std::upper_bound(samples.begin(), samples.end(), t,
                               [](double v, const EdgeSample& s) { return v < s.t; });
    if (it == samples.begin()) return nullptr;
    return &*std::prev(it);
  }
};

// Leftmost and rightmost occupied sites after every logged change time.
inline EdgePath extract_edges(const Trajectory& traj) {
  if (!traj.recorded) throw InvalidArgument("trajectory was evolved without a change log");
  EdgePath path;
  std::set<Site> occ(traj.initial.begin(), traj.initial.end());
  auto sample = [&](double t) {
    EdgeSample s{t, !occ.empty(), 0, 0};
    if (s.defined) {
      s.l = *occ.begin();
      s.r = *occ.rbegin();
    }
    path.samples.push_back(s);
  };
  sample(traj.start.down);
  const auto& ch = traj.changes;
  for (std::size_t i = 0; i < ch.size();) {
    const double t = ch[i].t;
    for (; i < ch.size() && ch[i].t == t; ++i) {
      if (ch[i].state) {
        occ.insert(ch[i].x);
      } else {
        occ.erase(ch[i].x);
      }
    }
    sample(t);
  }
  return path;
}

struct InvariantSample {
  Configuration configuration;
  SiteWindow window;
  double burn_in = 0.0;
  SeedKey seed;

  double density() const {
    return window.empty() ? 0.0
                          : static_cast<double>(configuration.sites().size()) / static_cast<double>(window.size());
  }
};

// Approximate draw from the upper invariant measure: the unrestricted process
// on the window started from all ones and run for burn_in time units.
inline InvariantSample sample_upper_invariant(double lambda, SiteWindow window, double burn_in, SeedKey seed) {
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be non-negative");
  if (!(burn_in > 0.0)) throw InvalidArgument("burn-in time must be positive");
  const EventTimeline tl = EventTimeline::build(window, burn_in, lambda, 0.0, seed);
  EvolveOptions opts;
  opts.record = false;
  Trajectory traj = evolve(tl, FullSpace{}, Configuration::all(), opts);
  return {Configuration::from_sites(std::move(traj.final_sites)), window, burn_in, seed};
}

struct EdgeSpeedOptions {
  std::optional<double> right_margin;  // default 2(lambda+1) horizon
  Site left_depth = 100;               // Z^- is clipped to [-left_depth, 0]
  unsigned threads = 1;
};

struct EdgeSpeedEstimate {
  double alpha_hat = 0.0;
  double std_error = 0.0;
  stats::Interval ci;
  std::size_t replicas = 0;
  std::size_t used = 0;
  std::size_t discarded = 0;  // right window edge touched
  std::size_t extinct = 0;    // clipped half-line died out; edge clamped below the window
  SiteWindow window;
  std::vector<double> per_replica;  // r_T / T, in replica order
};

// Mean of r_T / T for the process started from Z^- (clipped), over replicas.
inline EdgeSpeedEstimate estimate_edge_speed(double lambda, double horizon, std::size_t replicas, SeedKey seed,
                                             const EdgeSpeedOptions& opts = {}) {
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be non-negative");
  if (!(horizon > 0.0) || replicas == 0) throw InvalidArgument("horizon and replicas must be positive");
  const double margin = opts.right_margin.value_or(2.0 * (lambda + 1.0) * horizon);
  const SiteWindow window{-opts.left_depth, static_cast<Site>(std::ceil(margin))};

  struct One {
    double speed = 0.0;
    bool touched = false;
    bool extinct = false;
  };
  auto results = run_replicas(replicas, opts.threads, [&](std::size_t i) {
    const EventTimeline tl = EventTimeline::build(window, horizon, lambda, 0.0, seed.child(i));
    EvolveOptions eo;
    eo.record = false;
    const Trajectory traj = evolve(tl, FullSpace{}, Configuration::left_half_line(0), eo);
    One r;
    r.touched = traj.edge_touched();
    if (traj.final_sites.empty()) {
      r.extinct = true;
      r.speed = static_cast<double>(window.first - 1) / horizon;
    } else {
      r.speed = static_cast<double>(traj.final_sites.back()) / horizon;
    }
    return r;
  });

  EdgeSpeedEstimate est;
  est.replicas = replicas;
  est.window = window;
  for (const auto& r : results) {
    if (r.touched) {
      ++est.discarded;
      continue;
    }
    if (r.extinct) ++est.extinct;
    est.per_replica.push_back(r.speed);
  }
  if (static_cast<double>(est.discarded) > 0.1 * static_cast<double>(replicas))
    throw WindowTooSmall("more than 10% of edge-speed replicas touched the window edge");
  est.used = est.per_replica.size();
  const auto s = stats::summarize(est.per_replica);
  est.alpha_hat = s.mean;
  est.std_error = s.std_error();
  est.ci = s.normal_ci();
  return est;
}

}  // namespace wedgecp
