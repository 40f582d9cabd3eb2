#pragma once

// Brute-force reachability over the finite event DAG of a timeline. Nodes are
// (site, arrival time); an edge follows one arrow after a death-free vertical
// run. Region membership is checked at both ends of every vertical run, which
// is exact for regions whose per-site sections are intervals.

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "wedgecp/regions.hpp"
#include "wedgecp/timeline.hpp"

namespace oracle {

using wedgecp::Direction;
using wedgecp::EventTimeline;
using wedgecp::Region;
using wedgecp::Site;

struct DagOracle {
  const EventTimeline& tl;
  const Region& region;
  bool require_2path = false;

  // No death at x in (a, b], or in [a, b] when the run starts at time zero.
  bool vertical_ok(Site x, double a, double b, bool from_start) const {
    for (double d : tl.deaths(x)) {
      if (d > b) break;
      if (d > a || (from_start && d >= a)) return false;
    }
    return wedgecp::contains(region, x, a) && wedgecp::contains(region, x, b);
  }

  std::vector<Site> reachable(const std::vector<Site>& sources, double end) const {
    std::set<std::pair<Site, double>> seen;
    std::vector<std::pair<std::pair<Site, double>, bool>> stack;
    for (Site x : sources) stack.push_back({{x, 0.0}, true});
    std::set<Site> out;
    while (!stack.empty()) {
      auto [node, from_start] = stack.back();
      stack.pop_back();
      auto [x, a] = node;
      if (!seen.insert(node).second) continue;
      if (vertical_ok(x, a, end, from_start)) out.insert(x);
      for (Direction dir : {Direction::kLeft, Direction::kRight}) {
        const Site y = wedgecp::target(x, dir);
        if (!tl.window().contains(y)) continue;
        auto times = tl.arrows(x, dir);
        auto labels = tl.labels(x, dir);
        for (std::size_t i = 0; i < times.size(); ++i) {
          const double t = times[i];
          if (t < a || t > end) continue;
          if (require_2path && labels[i]) continue;
          if (!vertical_ok(x, a, t, from_start)) continue;
          if (!wedgecp::contains(region, y, t)) continue;
          stack.push_back({{y, t}, false});
        }
      }
    }
    return {out.begin(), out.end()};
  }
};

}  // namespace oracle
