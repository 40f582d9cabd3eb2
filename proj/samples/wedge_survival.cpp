// Survival of the contact process confined to a wedge, for a few widths M.

#include <cstdio>

#include "wedgecp/contact.hpp"
#include "wedgecp/stats.hpp"

using namespace wedgecp;

int main() {
  const double lambda = 4.0, horizon = 50.0;
  const Rational al(3, 4), ar(2);
  const std::size_t replicas = 200;
  for (int m : {2, 5, 10, 20}) {
    std::size_t alive = 0;
    const Wedge w(al, ar, m);
    const SiteWindow window{-1, m + static_cast<Site>(2 * horizon) + 1};
    for (std::size_t i = 0; i < replicas; ++i) {
      const auto tl = EventTimeline::build(window, horizon, lambda, 0.0, SeedKey{1, i});
      EvolveOptions opts;
      opts.record = false;
      alive += evolve(tl, w, Configuration::interval(0, m), opts).survived();
    }
    const auto ci = stats::wilson(alive, replicas);
    std::printf("M=%-3d survival %.3f  [%.3f, %.3f]\n", m, static_cast<double>(alive) / replicas, ci.low, ci.high);
  }
}
