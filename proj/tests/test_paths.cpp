#include <gtest/gtest.h>

#include "oracles/dag_oracle.hpp"
#include "wedgecp/paths.hpp"

using namespace wedgecp;

namespace {

EventTimeline from_events(SiteWindow w, double horizon, std::vector<TimelineEvent> ev) {
  EventTimeline::Params p;
  p.window = w;
  p.horizon = horizon;
  p.lambda = 1.0;
  return EventTimeline::from_events(p, std::move(ev));
}

TimelineEvent death(Site x, double t) { return {EventKind::kDeath, x, x, t, false}; }
TimelineEvent arrow(Site x, Site y, double t, bool one_only = false) { return {EventKind::kArrow, x, y, t, one_only}; }

std::vector<Region> small_regions() {
  return {FullSpace{}, Wedge(Rational(1, 2), Rational(2), Rational(4)),
          Parallelogram::geometry(ParallelogramKind::kL, 0, 0, 12, 1, Rational(1, 6))};
}

}  // namespace

TEST(Paths, TrivialPathFromPointToItself) {
  const auto tl = EventTimeline::build({0, 3}, 2.0, 1.0, 0.0, SeedKey{1, 0});
  EXPECT_TRUE(active_path_exists(tl, FullSpace{}, {1, 0.5}, {1, 0.5}));
}

TEST(Paths, DeathSeversVerticalSegment) {
  const auto tl = from_events({0, 0}, 3.0, {death(0, 1.0)});
  EXPECT_FALSE(active_path_exists(tl, FullSpace{}, {0, 0.0}, {0, 2.0}));
  EXPECT_TRUE(active_path_exists(tl, FullSpace{}, {0, 0.0}, {0, 0.5}));
  EXPECT_TRUE(active_path_exists(tl, FullSpace{}, {0, 1.5}, {0, 2.5}));
}

TEST(Paths, ArrowCarriesPathAcross) {
  const auto tl = from_events({0, 2}, 3.0, {arrow(0, 1, 0.5), arrow(1, 2, 1.0), death(0, 0.7)});
  EXPECT_TRUE(active_path_exists(tl, FullSpace{}, {0, 0.0}, {2, 2.0}));
  EXPECT_FALSE(active_path_exists(tl, FullSpace{}, {0, 0.6}, {2, 2.0}));
  EXPECT_FALSE(active_path_exists(tl, FullSpace{}, {2, 0.0}, {0, 2.0}));
}

TEST(Paths, TwoPathsSkipOneOnlyArrows) {
  const auto tl = from_events({0, 1}, 2.0, {arrow(0, 1, 0.5, true)});
  EXPECT_TRUE(active_path_exists(tl, FullSpace{}, {0, 0.0}, {1, 1.0}));
  PathOptions two;
  two.require_2path = true;
  EXPECT_FALSE(active_path_exists(tl, FullSpace{}, {0, 0.0}, {1, 1.0}, two));
}

TEST(Paths, BlockedIntervalsStopVerticalSegments) {
  const auto tl = from_events({0, 1}, 3.0, {arrow(0, 1, 0.5)});
  BlockedIntervals blocked(tl.window());
  blocked.add(1, 1.0, 1.5);
  blocked.finalize();
  PathOptions opts;
  opts.blocked = &blocked;
  EXPECT_FALSE(active_path_exists(tl, FullSpace{}, {0, 0.0}, {1, 2.0}, opts));
  EXPECT_TRUE(active_path_exists(tl, FullSpace{}, {0, 0.0}, {1, 0.9}, opts));
  EXPECT_TRUE(active_path_exists(tl, FullSpace{}, {0, 0.0}, {0, 2.0}, opts));
}

TEST(Paths, RegionBoundaryIsClosed) {
  // Wedge(1/2, 1, 0): site 1 is inside for t in [0, 2]; the arrow at t = 1 lands inside.
  const auto tl = from_events({0, 2}, 3.0, {arrow(0, 1, 1.0)});
  const Region w = Wedge(Rational(1, 2), 1, 1);
  EXPECT_FALSE(active_path_exists(tl, w, {0, 0.0}, {1, 1.5}));  // site 0 leaves at t = 0
  const Region v = Wedge(Rational(1, 2), 1, 1, -1);
  EXPECT_TRUE(active_path_exists(tl, v, {0, 0.0}, {1, 1.5}));
  EXPECT_TRUE(active_path_exists(tl, v, {0, 0.0}, {0, 2.0}));  // x=0 leaves at t=2, inclusive
  EXPECT_FALSE(active_path_exists(tl, v, {0, 0.0}, {0, 2.5}));
}

TEST(Paths, QueriesOutsideWindowFail) {
  const auto tl = EventTimeline::build({0, 3}, 2.0, 1.0, 0.0, SeedKey{1, 0});
  EXPECT_THROW(active_path_exists(tl, FullSpace{}, {0, 0.0}, {4, 1.0}), OutOfWindow);
  EXPECT_THROW(active_path_exists(tl, FullSpace{}, {0, 0.0}, {1, 3.0}), OutOfWindow);
  EXPECT_THROW(active_path_exists(tl, FullSpace{}, {0, 1.0}, {1, 0.5}), InvalidArgument);
}

TEST(Paths, MatchesDagOracleOnRandomTimelines) {
  std::size_t mismatches = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double lambda = i % 3 == 0 ? 0.5 : (i % 3 == 1 ? 2.0 : 4.0);
    const auto tl = EventTimeline::build({0, 9}, 3.0, lambda, 0.4, SeedKey{77, i});
    for (const auto& region : small_regions()) {
      for (bool two : {false, true}) {
        std::vector<Site> sources;
        for (Site x = 0; x <= 9; ++x)
          if (contains(region, x, 0.0) && (x + static_cast<Site>(i)) % 3 != 0) sources.push_back(x);
        PathOptions opts;
        opts.require_2path = two;
        const auto got = reachable_sites(tl, region, sources, ExactTime::from_double(0.0), ExactTime::from_double(3.0), opts);
        const auto want = oracle::DagOracle{tl, region, two}.reachable(sources, 3.0);
        mismatches += got != want;
        if (!sources.empty()) {
          const Site to = static_cast<Site>(i % 10);
          const bool single = active_path_exists(tl, region, {sources.front(), 0.0}, {to, 3.0}, opts);
          const auto one = oracle::DagOracle{tl, region, two}.reachable({sources.front()}, 3.0);
          mismatches += single != std::binary_search(one.begin(), one.end(), to);
        }
      }
    }
  }
  EXPECT_EQ(mismatches, 0u);
}
