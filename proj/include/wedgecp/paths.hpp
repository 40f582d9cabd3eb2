#pragma once

// Active-path queries on the graphical representation.
//
// The search runs over "life segments": a site entered at time a stays usable
// until the first of its next death, the end of its region interval, or the
// next blocked point. Arrivals are expanded in time order, and an arrival that
// falls inside an already expanded segment of the same site is dominated.

#include <algorithm>
#include <queue>
#include <vector>

#include "wedgecp/schedule.hpp"
#include "wedgecp/timeline.hpp"

namespace wedgecp {

struct PathOptions {
  bool require_2path = false;                // skip arrows carrying the 1-only label
  const BlockedIntervals* blocked = nullptr;  // vertical segments may not meet these points
};

namespace detail {

class PathSearch {
 public:
  PathSearch(const EventTimeline& tl, const Region& region, const PathOptions& opts)
      : tl_(tl), schedule_(region, tl.window()), opts_(opts), last_(tl.window().size()) {}

  // Expands all paths starting at (x, start) for x in sources, up to `end`.
  // Stops early once `stop_at` (if any) is found alive at `end`.
  bool run(const std::vector<Site>& sources, const ExactTime& start, const ExactTime& end,
           std::optional<Site> stop_at) {
    using Item = std::pair<double, Site>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;

    for (Site x : sources) {
      const RegionSchedule::Slot* slot = schedule_.find(x, start);
      if (!slot) continue;
      if (opts_.blocked && opts_.blocked->blocked(x, start.down)) continue;
      Segment seg = open_segment(x, start.down, *slot, /*from_start=*/true, start);
      if (!seg.alive_at(start.down)) continue;
      if (!expand(x, seg, end, stop_at, queue)) return true;
    }
    while (!queue.empty()) {
      const auto [a, y] = queue.top();
      queue.pop();
      auto& prev = last_[idx(y)];
      if (prev && prev->alive_at(a)) continue;
      const RegionSchedule::Slot* slot = schedule_.find(y, a);
      Segment seg = open_segment(y, a, *slot, /*from_start=*/false, start);
      if (!expand(y, seg, end, stop_at, queue)) return true;
    }
    return false;
  }

  // Sites alive at `end` after run().
  std::vector<Site> alive_at_end(const ExactTime& end) const {
    std::vector<Site> out;
    const SiteWindow w = tl_.window();
    for (Site x = w.first; x <= w.last; ++x) {
      const auto& seg = last_[idx(x)];
      if (seg && seg->alive_at_end(end)) out.push_back(x);
    }
    return out;
  }

 private:
  struct Segment {
    double start;        // arrival time
    double death;        // first death that kills the occupant
    ExactTime region_hi;
    double next_block;

    bool alive_at(double t) const {
      return t >= start && t < death && le(t, region_hi) && t < next_block;
    }
    // Alive at the exact instant `end`.
    bool alive_at_end(const ExactTime& end) const {
      return le(start, end) && gt(death, end) && le(end, region_hi) && gt(next_block, end);
    }
  };

  std::size_t idx(Site x) const { return static_cast<std::size_t>(x - tl_.window().first); }

  Segment open_segment(Site x, double a, const RegionSchedule::Slot& slot, bool from_start,
                       const ExactTime& start) const {
    Segment s;
    s.start = a;
    auto deaths = tl_.deaths(x);
    // A death at the arrival instant is processed before the arrival; a death
    // at the initial instant kills the initial occupant.
    auto it = from_start ? std::find_if(deaths.begin(), deaths.end(), [&](double d) { return ge(d, start); })
                         : std::upper_bound(deaths.begin(), deaths.end(), a);
    s.death = it == deaths.end() ? std::numeric_limits<double>::infinity() : *it;
    if (from_start && it != deaths.end() && le(*it, start)) s.death = -1.0;  // dies at the start instant
    s.region_hi = slot.hi;
    s.next_block = opts_.blocked ? opts_.blocked->next_block_after(x, a) : std::numeric_limits<double>::infinity();
    return s;
  }

  // Returns false when the stop target was reached.
  template <class Queue>
  bool expand(Site x, const Segment& seg, const ExactTime& end, std::optional<Site> stop_at, Queue& queue) {
    last_[idx(x)] = seg;
    if (stop_at && *stop_at == x && seg.alive_at_end(end)) return false;
    const SiteWindow w = tl_.window();
    for (Direction dir : {Direction::kLeft, Direction::kRight}) {
      const Site y = target(x, dir);
      if (!w.contains(y)) continue;
      auto times = tl_.arrows(x, dir);
      auto labels = tl_.labels(x, dir);
      for (auto it = std::lower_bound(times.begin(), times.end(), seg.start); it != times.end(); ++it) {
        const double t = *it;
        if (gt(t, end) || !seg.alive_at(t)) break;
        if (opts_.require_2path && labels[static_cast<std::size_t>(it - times.begin())]) continue;
        if (!schedule_.find(y, t)) continue;
        if (opts_.blocked && opts_.blocked->blocked(y, t)) continue;
        const auto& prev = last_[idx(y)];
        if (prev && prev->alive_at(t)) continue;
        queue.emplace(t, y);
      }
    }
    return true;
  }

  const EventTimeline& tl_;
  RegionSchedule schedule_;
  PathOptions opts_;
  std::vector<std::optional<Segment>> last_;
};

inline void check_point(const EventTimeline& tl, Site x, const ExactTime& t) {
  if (!tl.window().contains(x)) throw OutOfWindow("path endpoint site outside timeline window");
  if (t.down < 0.0 || !le(t, ExactTime::from_double(tl.horizon())))
    throw OutOfWindow("path endpoint time outside [0, horizon]");
}

}  // namespace detail

// True iff an active path runs from `from` up to `to` inside `region`.
inline bool active_path_exists(const EventTimeline& tl, const Region& region, const SpaceTimePoint& from,
                               const SpaceTimePoint& to, const PathOptions& opts = {}) {
  const ExactTime s = ExactTime::from_double(from.t), e = ExactTime::from_double(to.t);
  detail::check_point(tl, from.x, s);
  detail::check_point(tl, to.x, e);
  if (from.t > to.t) throw InvalidArgument("path must run upward in time");
  if (from.x == to.x && from.t == to.t) return true;
  detail::PathSearch search(tl, region, opts);
  return search.run({from.x}, s, e, to.x);
}

// Sites y such that some source x has an active path from (x, start) to (y, end)
// inside the region. Times are exact so rational start/end instants can be used.
inline std::vector<Site> reachable_sites(const EventTimeline& tl, const Region& region, const std::vector<Site>& sources,
                                         const ExactTime& start, const ExactTime& end, const PathOptions& opts = {}) {
  for (Site x : sources) detail::check_point(tl, x, start);
  detail::check_point(tl, tl.window().first, end);
  if (!le(start, end)) throw InvalidArgument("path must run upward in time");
  detail::PathSearch search(tl, region, opts);
  search.run(sources, start, end, std::nullopt);
  return search.alive_at_end(end);
}

}  // namespace wedgecp
