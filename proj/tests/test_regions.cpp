#include <random>

#include <gtest/gtest.h>

#include "wedgecp/regions.hpp"

using namespace wedgecp;

namespace {

using K = ParallelogramKind;

RationalPoint pt(Rational x, Rational t) { return {x, t}; }

Region parallelogram(K kind, std::int64_t j, std::int64_t k) {
  return make_parallelogram(kind, j, k, 6, 2, Rational(1, 3));
}

// Every rational grid point (x, t) with denominators dividing `den`.
template <class Fn>
void grid(Rational x0, Rational x1, Rational t0, Rational t1, std::int64_t den, Fn&& fn) {
  const Rational step(1, den);
  for (Rational t = t0; t <= t1; t += step)
    for (Rational x = x0; x <= x1; x += step) fn(x, t);
}

}  // namespace

TEST(Wedge, MembershipExamples) {
  const Region w = Wedge(Rational(1, 2), 1, 10);
  EXPECT_TRUE(contains(w, 0, 0));
  EXPECT_FALSE(contains(w, 4, 10));
  EXPECT_TRUE(contains(w, 20, 10));
  EXPECT_FALSE(contains(w, 21, 10));
  EXPECT_FALSE(contains(w, 0, -1));
}

TEST(Wedge, RejectsBadSpeeds) {
  EXPECT_THROW(Wedge(1, 1, 1), InvalidArgument);
  EXPECT_THROW(Wedge(0, 1, 1), InvalidArgument);
  EXPECT_THROW(Wedge(Rational(1, 2), 1, -1), InvalidArgument);
}

TEST(Parallelogram, LeftBaseExample) {
  const Parallelogram p = make_parallelogram(K::kL, 0, 0, 6, 2, Rational(1, 3));
  EXPECT_EQ(p.corners[0], pt(1, 0));
  EXPECT_EQ(p.corners[1], pt(3, 0));
  EXPECT_EQ(p.corners[2], pt(-11, 7));
  EXPECT_EQ(p.corners[3], pt(-13, 7));
  EXPECT_EQ(p.top_time(), Rational(7));
  grid(-15, 5, 0, 8, 2, [&](const Rational& x, const Rational& t) {
    const Rational v = x + 2 * t;
    EXPECT_EQ(p.contains(x, t), 1 <= v && v <= 3 && t <= 7);
  });
}

TEST(Parallelogram, RightBaseExample) {
  const Parallelogram p = make_parallelogram(K::kR, 0, 0, 6, 2, Rational(1, 3));
  EXPECT_EQ(p.corners[0], pt(-3, 0));
  EXPECT_EQ(p.corners[1], pt(-1, 0));
  grid(-5, 15, 0, 8, 2, [&](const Rational& x, const Rational& t) {
    const Rational v = x - 2 * t;
    EXPECT_EQ(p.contains(x, t), -3 <= v && v <= -1 && t <= 7);
  });
}

TEST(Parallelogram, TranslateExample) {
  const Parallelogram a = make_parallelogram(K::kL, 0, 0, 6, 2, Rational(1, 3));
  const Parallelogram b = make_parallelogram(K::kL, 1, 1, 6, 2, Rational(1, 3));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(b.corners[i], pt(a.corners[i].x + 10, a.corners[i].t + 6));
}

TEST(Parallelogram, SmallVariantHeight) {
  const Region s = parallelogram(K::kLSmall, 0, 0);
  EXPECT_TRUE(contains(s, 1, 0));
  EXPECT_FALSE(contains(s, 1, 2));
  EXPECT_EQ(std::get<Parallelogram>(s).top_time(), Rational(3, 2));
}

TEST(Parallelogram, SmallVariantsGiveSameIntersection) {
  const auto r = std::get<Parallelogram>(parallelogram(K::kR, 0, 0));
  const auto l = std::get<Parallelogram>(parallelogram(K::kL, 0, 0));
  const auto rs = std::get<Parallelogram>(parallelogram(K::kRSmall, 0, 0));
  const auto ls = std::get<Parallelogram>(parallelogram(K::kLSmall, 0, 0));
  grid(-4, 4, 0, 3, 4, [&](const Rational& x, const Rational& t) {
    const bool both = r.contains(x, t) && l.contains(x, t);
    EXPECT_EQ(rs.contains(x, t) && l.contains(x, t), both);
    EXPECT_EQ(r.contains(x, t) && ls.contains(x, t), both);
  });
}

TEST(Parallelogram, PreconditionsChecked) {
  EXPECT_THROW(make_parallelogram(K::kL, 1, 0, 6, 2, Rational(1, 3)), InvalidArgument);
  EXPECT_THROW(make_parallelogram(K::kL, 0, -2, 6, 2, Rational(1, 3)), InvalidArgument);
  EXPECT_THROW(make_parallelogram(K::kL, 0, 0, 6, 2, Rational(2, 3)), InvalidArgument);
  EXPECT_THROW(make_parallelogram(K::kL, 0, 0, 5, 2, Rational(1, 3)), InvalidArgument);
}

TEST(Regions, FullSpaceContainsEverything) {
  const Region f = FullSpace{};
  EXPECT_TRUE(contains(f, Rational(-1000), Rational(12345)));
  EXPECT_TRUE(contains(f, 3, 0.25));
}

TEST(Regions, SiteIntervalsAgreeWithMembership) {
  const std::vector<Region> regions = {
      Wedge(Rational(1, 2), 1, 10),
      Wedge(Rational(2, 3), Rational(5, 4), 3, Rational(-7, 2), Rational(1, 3)),
      HalfSpace(Rational(3, 2), 4),
      parallelogram(K::kL, 2, 2),
      parallelogram(K::kRSmall, -1, 1),
      ParallelogramUnion{{std::get<Parallelogram>(parallelogram(K::kL, 0, 0)),
                          std::get<Parallelogram>(parallelogram(K::kR, 0, 0)),
                          std::get<Parallelogram>(parallelogram(K::kR, 1, 1))}},
  };
  for (const auto& region : regions)
    for (Site x = -20; x <= 30; ++x) {
      const auto ivs = site_intervals(region, x);
      for (Rational t = 0; t <= 20; t += Rational(1, 6)) {
        const bool in_list = std::any_of(ivs.begin(), ivs.end(), [&](const TimeInterval& iv) { return iv.contains(t); });
        EXPECT_EQ(in_list, contains(region, Rational(x), t)) << "x=" << x << " t=" << t;
        // The double-valued query agrees wherever t is exactly representable.
        if (t.den() == 1 || t.den() == 2) EXPECT_EQ(contains(region, x, t.to_double()), in_list);
      }
    }
}

TEST(Regions, UnionIntervalsAreMergedAndSorted) {
  const ParallelogramUnion u{{std::get<Parallelogram>(parallelogram(K::kL, 0, 0)),
                              std::get<Parallelogram>(parallelogram(K::kR, 0, 0))}};
  for (Site x = -15; x <= 15; ++x) {
    const auto ivs = u.site_intervals(x);
    for (std::size_t i = 1; i < ivs.size(); ++i) EXPECT_LT(*ivs[i - 1].hi, ivs[i].lo);
  }
}

TEST(Regions, SiteExtentCoversAllMembers) {
  const Region p = parallelogram(K::kR, 2, 2);
  const auto ext = site_extent(p, Rational(100));
  ASSERT_TRUE(ext.has_value());
  for (Site x = ext->first - 5; x <= ext->last + 5; ++x) {
    const bool any = !site_intervals(p, x).empty();
    EXPECT_EQ(any, x >= ext->first && x <= ext->last) << x;
  }
  EXPECT_FALSE(site_extent(Region(FullSpace{}), Rational(1)).has_value());
}

TEST(Regions, JsonRoundTrip) {
  const std::vector<Region> regions = {FullSpace{}, Wedge(Rational(1, 3), Rational(7, 5), Rational(9, 2)),
                                       HalfSpace(2, 0), parallelogram(K::kLSmall, 1, 3),
                                       ParallelogramUnion{{std::get<Parallelogram>(parallelogram(K::kL, 0, 0))}}};
  for (const auto& r : regions) {
    const auto j = region_to_json(r);
    const Region back = region_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(region_to_json(back).dump(), j.dump());
  }
}
