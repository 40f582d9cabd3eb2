// One grass-bushes-trees run from trees on the negative half-line and a bush
// at the origin; prints the counts of bushes and trees over time.

#include <cstdio>

#include "wedgecp/gbt.hpp"

using namespace wedgecp;

int main() {
  const double l1 = 4.0, l2 = 2.0, horizon = 40.0;
  const auto tl = EventTimeline::build({-100, 400}, horizon, l1, (l1 - l2) / l1, SeedKey{3, 0});
  const GbtTrajectory z = evolve_gbt(tl, l1, l2, GbtConfiguration::trees_left_bush_at(0));
  double next = 0.0;
  for (const auto& c : z.counts) {
    if (c.t < next) continue;
    std::printf("t=%5.1f  bushes %4zu  trees %4zu\n", c.t, c.ones, c.twos);
    next += 5.0;
  }
  std::printf("final   bushes %4zu  trees %4zu\n", z.final_count(1), z.final_count(2));
}
