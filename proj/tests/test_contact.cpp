#include <cmath>

#include <gtest/gtest.h>

#include "oracles/dag_oracle.hpp"
#include "wedgecp/contact.hpp"
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

bool subset(const std::vector<Site>& a, const std::vector<Site>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST(Evolve, EmptyInitialStaysEmpty) {
  const auto tl = EventTimeline::build({0, 9}, 3.0, 4.0, 0.0, SeedKey{1, 0});
  const Trajectory t = evolve(tl, FullSpace{}, Configuration{});
  EXPECT_TRUE(t.changes.empty());
  EXPECT_FALSE(t.survived());
}

TEST(Evolve, SingleDeath) {
  const auto tl = from_events({-2, 2}, 3.0, {{EventKind::kDeath, 0, 0, 1.0, false}});
  const Trajectory t = evolve(tl, FullSpace{}, Configuration::single(0));
  EXPECT_EQ(t.state_at(0.999), std::vector<Site>{0});
  EXPECT_TRUE(t.state_at(1.0).empty());
  ASSERT_EQ(t.changes.size(), 1u);
  EXPECT_EQ(t.changes[0].t, 1.0);
}

TEST(Evolve, ZeroRateOnlyKillsSites) {
  const auto tl = EventTimeline::build({0, 9}, 5.0, 0.0, 0.0, SeedKey{3, 0});
  const Trajectory t = evolve(tl, FullSpace{}, Configuration::interval(0, 9));
  for (const auto& c : t.changes) EXPECT_EQ(c.state, 0);
}

TEST(Evolve, EqualsPathReachability) {
  std::size_t mismatches = 0, runs = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double lambda = i % 3 == 0 ? 0.5 : (i % 3 == 1 ? 2.0 : 4.0);
    const auto tl = EventTimeline::build({-4, 9}, 3.0, lambda, 0.0, SeedKey{31, i});
    const std::vector<Region> regions = {FullSpace{}, Wedge(Rational(1, 2), Rational(2), Rational(4)),
                                         Parallelogram::geometry(ParallelogramKind::kL, 0, 0, 12, 1, Rational(1, 6))};
    for (const auto& region : regions) {
      std::vector<Site> init;
      for (Site x = -4; x <= 9; ++x)
        if (contains(region, x, 0.0) && (x * 7 + static_cast<Site>(i)) % 3 != 0) init.push_back(x);
      const Trajectory t = evolve(tl, region, Configuration::from_sites(init));
      const auto want = oracle::DagOracle{tl, region}.reachable(init, 3.0);
      mismatches += t.final_sites != want;
      // Intermediate states agree with reachability up to that time.
      const auto mid = reachable_sites(tl, region, init, ExactTime::from_double(0.0), ExactTime::from_double(1.5));
      mismatches += t.state_at(1.5) != mid;
      ++runs;
    }
  }
  EXPECT_EQ(runs, 3000u);
  EXPECT_EQ(mismatches, 0u);
}

TEST(Evolve, AttractiveInInitialState) {
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto tl = EventTimeline::build({-20, 20}, 5.0, 2.0, 0.0, SeedKey{32, i});
    const auto small = evolve(tl, FullSpace{}, Configuration::from_sites({-3, 0, 4}));
    const auto large = evolve(tl, FullSpace{}, Configuration::interval(-5, 5));
    EXPECT_TRUE(subset(small.final_sites, large.final_sites));
  }
}

TEST(Evolve, MonotoneInRegion) {
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto tl = EventTimeline::build({-5, 60}, 10.0, 3.0, 0.0, SeedKey{33, i});
    const auto narrow = evolve(tl, Wedge(1, 2, 4), Configuration::interval(0, 4));
    const auto wide = evolve(tl, Wedge(Rational(1, 2), 3, 8), Configuration::interval(0, 8));
    const auto full = evolve(tl, FullSpace{}, Configuration::interval(0, 8));
    EXPECT_TRUE(subset(narrow.final_sites, wide.final_sites));
    EXPECT_TRUE(subset(wide.final_sites, full.final_sites));
  }
}

TEST(Evolve, StartTimeAndRecordFlag) {
  const auto tl = EventTimeline::build({0, 30}, 6.0, 3.0, 0.0, SeedKey{34, 0});
  EvolveOptions late;
  late.start = ExactTime::from_double(2.0);
  const auto a = evolve(tl, FullSpace{}, Configuration::interval(10, 12), late);
  const auto want = reachable_sites(tl, FullSpace{}, {10, 11, 12}, ExactTime::from_double(2.0), ExactTime::from_double(6.0));
  EXPECT_EQ(a.final_sites, want);
  EvolveOptions quiet = late;
  quiet.record = false;
  const auto b = evolve(tl, FullSpace{}, Configuration::interval(10, 12), quiet);
  EXPECT_EQ(b.final_sites, a.final_sites);
  EXPECT_TRUE(b.changes.empty());
  EXPECT_THROW(b.state_at(3.0), InvalidArgument);
}

TEST(Evolve, RejectsBadInputs) {
  const auto tl = EventTimeline::build({0, 10}, 2.0, 1.0, 0.0, SeedKey{35, 0});
  EXPECT_THROW(evolve(tl, Wedge(1, 2, 3), Configuration::single(5)), InvalidArgument);
  EvolveOptions past;
  past.end = ExactTime::from_double(3.0);
  EXPECT_THROW(evolve(tl, FullSpace{}, Configuration::single(5), past), OutOfWindow);
}

TEST(Evolve, CofiniteTailsDoNotCountAsEdgeTouches) {
  const auto tl = EventTimeline::build({-10, 40}, 2.0, 2.0, 0.0, SeedKey{36, 0});
  const auto t = evolve(tl, FullSpace{}, Configuration::left_half_line(0));
  EXPECT_TRUE(t.cofinite_left);
  EXPECT_FALSE(t.edge_touched());
}

TEST(Edges, InitialIntervalEdges) {
  const auto tl = EventTimeline::build({-5, 15}, 1.0, 1.0, 0.0, SeedKey{37, 0});
  const auto t = evolve(tl, FullSpace{}, Configuration::interval(0, 10));
  const auto e = extract_edges(t);
  ASSERT_FALSE(e.samples.empty());
  EXPECT_EQ(e.samples.front().l, 0);
  EXPECT_EQ(e.samples.front().r, 10);
  EXPECT_TRUE(e.samples.front().defined);
}

TEST(Edges, EmptyConfigurationIsFlagged) {
  const auto tl = EventTimeline::build({0, 5}, 1.0, 1.0, 0.0, SeedKey{38, 0});
  const auto e = extract_edges(evolve(tl, FullSpace{}, Configuration{}));
  ASSERT_EQ(e.samples.size(), 1u);
  EXPECT_FALSE(e.samples.front().defined);
}

TEST(Edges, MatchReconstructedStates) {
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto tl = EventTimeline::build({-30, 30}, 5.0, 2.5, 0.0, SeedKey{39, i});
    const auto t = evolve(tl, FullSpace{}, Configuration::interval(-2, 2));
    for (const auto& s : extract_edges(t).samples) {
      const auto state = t.state_at(s.t);
      ASSERT_EQ(s.defined, !state.empty());
      if (!s.defined) continue;
      EXPECT_EQ(s.l, state.front());
      EXPECT_EQ(s.r, state.back());
    }
  }
}

TEST(Invariant, ZeroRateEmpties) {
  const auto s = sample_upper_invariant(0.0, {0, 49}, 30.0, SeedKey{40, 0});
  EXPECT_EQ(s.density(), 0.0);  // all 50 sites die by t = 30 except with probability ~50 e^-30
}

TEST(Invariant, DensityStabilizesWithBurnIn) {
  std::vector<double> diff;
  for (std::uint64_t i = 0; i < 40; ++i) {
    const double a = sample_upper_invariant(4.0, {0, 399}, 25.0, SeedKey{41, i}).density();
    const double b = sample_upper_invariant(4.0, {0, 399}, 50.0, SeedKey{42, i}).density();
    diff.push_back(a - b);
  }
  const auto s = stats::summarize(diff);
  EXPECT_LT(std::fabs(s.mean), 3.0 * s.std_error() + 1e-3);
}

TEST(Invariant, DensityIncreasesWithRate) {
  std::vector<double> diff;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const SeedKey key{43, i};
    diff.push_back(sample_upper_invariant(4.0, {0, 199}, 20.0, key).density() -
                   sample_upper_invariant(2.0, {0, 199}, 20.0, key).density());
  }
  const auto s = stats::summarize(diff);
  EXPECT_GT(s.mean, 3.0 * s.std_error());
}

TEST(EdgeSpeed, NoBirthsMeansNoAdvance) {
  const auto e = estimate_edge_speed(0.0, 20.0, 30, SeedKey{44, 0});
  EXPECT_LE(e.alpha_hat, 0.0);
}

TEST(EdgeSpeed, SupercriticalEdgeAdvances) {
  const auto e = estimate_edge_speed(4.0, 30.0, 40, SeedKey{45, 0});
  EXPECT_GT(e.ci.low, 0.0);
  EXPECT_EQ(e.used + e.discarded, 40u);
}

TEST(EdgeSpeed, NarrowWindowIsReported) {
  EdgeSpeedOptions opts;
  opts.right_margin = 3.0;
  EXPECT_THROW(estimate_edge_speed(4.0, 20.0, 20, SeedKey{46, 0}, opts), WindowTooSmall);
}

TEST(Locality, EventsOutsideRegionAreIrrelevant) {
  const Parallelogram p = make_parallelogram(ParallelogramKind::kR, 0, 0, 8, 2, Rational(1, 2));
  const Region region = p;
  const SiteRange ext = p.site_extent();
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto tl = EventTimeline::build({ext.first - 5, ext.last + 5}, 12.0, 3.0, 0.0, SeedKey{47, i});
    const auto masked = tl.filtered([&](const TimelineEvent& e) {
      return contains(region, e.x, e.t) && (e.kind == EventKind::kDeath || contains(region, e.y, e.t));
    });
    const SiteRange b = p.bottom_sites();
    const auto init = Configuration::interval(b.first, b.last);
    EXPECT_EQ(evolve(tl, region, init).final_sites, evolve(masked, region, init).final_sites);
  }
}
