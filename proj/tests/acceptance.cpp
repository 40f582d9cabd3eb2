// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "oracles/ctmc_oracle.hpp"
#include "oracles/dag_oracle.hpp"
#include "wedgecp/wedgecp.hpp"

using namespace wedgecp;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

int failures = 0;

void run(int id, const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > limit_seconds) {
    o.pass = false;
    o.detail += " [over time limit]";
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d (%s): %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

bool solution_is(const IntegerSolution& s, std::int64_t m, std::int64_t c, Rational beta, std::int64_t ell,
                 std::int64_t d) {
  const auto [e, dd] = ell_d_from_slopes(s.s_l_prime, s.s_r, s.alpha, s.beta);
  return s.m == m && s.c == c && s.beta == beta && s.ell_prime == ell && s.d_prime == d && e == Rational(ell) &&
         dd == Rational(d) && s.s_r * (s.alpha - s.beta) == Rational(c, m);
}

Outcome exact_geometry() {
  const bool a = solution_is(solve_integer_wedge(2, Rational(1, 2), 1), 3, 5, Rational(1, 3), 7, 2);
  const bool b = solution_is(solve_integer_wedge(2, Rational(2, 3), 1), 4, 6, Rational(1, 2), 9, 2);
  return {a && b, std::string("(2,1/2,1): ") + (a ? "ok" : "wrong") + ", (2,2/3,1): " + (b ? "ok" : "wrong")};
}

Outcome containment() {
  std::size_t passed = 0, total = 0;
  for (auto [al, ar] : {std::pair{Rational(1, 2), Rational(1)}, std::pair{Rational(2, 3), Rational(1)}}) {
    ++total;
    passed += verify_containment(solve_integer_wedge(2, al, ar), al, ar, 100, 50).passed;
  }
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::int64_t> num(1, 9);
  std::size_t sweep = 0;
  while (sweep < 25) {
    const Rational alpha(std::uniform_int_distribution<std::int64_t>(10, 40)(rng), 10);
    Rational ar = alpha * Rational(num(rng), 10);
    Rational al = ar * Rational(num(rng), 10);
    ++sweep;
    ++total;
    passed += verify_containment(solve_integer_wedge(alpha, al, ar), al, ar, 100, 50).passed;
  }
  auto sol = solve_integer_wedge(2, Rational(1, 2), 1);
  sol.beta -= Rational(1, 100);
  const auto neg = verify_containment(sol, Rational(1, 2), 1, 100, 50);
  const bool control = !neg.passed && neg.violation.has_value();
  return {passed == total && control, std::to_string(passed) + "/" + std::to_string(total) +
                                          " solutions contained; perturbed beta: " + neg.message};
}

Outcome semantics() {
  std::size_t runs = 0, mismatches = 0;
  const std::vector<Region> regions = {
      FullSpace{}, Wedge(Rational(1, 2), Rational(1), Rational(3)),
      make_parallelogram(ParallelogramKind::kL, 0, 0, 16, Rational(1), Rational(1, 4))};
  for (std::uint64_t i = 0; i < 1200; ++i) {
    const double lambda = i % 3 == 0 ? 0.5 : (i % 3 == 1 ? 2.0 : 4.0);
    const auto tl = EventTimeline::build({0, 9}, 3.0, lambda, 0.0, SeedKey{303, i});
    for (const auto& region : regions) {
      std::vector<Site> init;
      for (Site x = 0; x <= 9; ++x)
        if (contains(region, x, 0.0)) init.push_back(x);
      EvolveOptions opts;
      opts.record = false;
      const auto state = evolve(tl, region, Configuration::from_sites(init), opts).final_sites;
      const auto paths = reachable_sites(tl, region, init, ExactTime::from_double(0.0), ExactTime::from_double(3.0));
      const auto brute = oracle::DagOracle{tl, region}.reachable(init, 3.0);
      mismatches += state != paths || state != brute;
      ++runs;
    }
  }
  return {mismatches == 0, std::to_string(runs) + " runs, " + std::to_string(mismatches) + " mismatches"};
}

Outcome gbt_oracle() {
  const std::vector<std::uint8_t> init = {2, 1, 0, 1, 2};
  const double l1 = 4.0, l2 = 2.0;
  const auto exact = oracle::gbt_marginals(init, l1, l2, 1.0);
  const std::size_t n = 10000;
  std::vector<std::array<std::size_t, 3>> hits(init.size(), {0, 0, 0});
  GbtConfiguration c;
  for (std::size_t x = 0; x < init.size(); ++x) c.set(static_cast<Site>(x), init[x]);
  GbtOptions opts;
  opts.record = false;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto tl = EventTimeline::build({0, 4}, 1.0, l1, (l1 - l2) / l1, SeedKey{404, i});
    const auto s = evolve_gbt(tl, l1, l2, c, opts).final_state;
    for (std::size_t x = 0; x < s.size(); ++x) ++hits[x][s[x]];
  }
  double worst = 0.0;
  for (std::size_t x = 0; x < init.size(); ++x)
    for (std::size_t v = 0; v < 3; ++v) {
      const double p = exact[x][v];
      const double se = std::sqrt(p * (1 - p) / static_cast<double>(n));
      const double z = std::fabs(static_cast<double>(hits[x][v]) / static_cast<double>(n) - p) / se;
      worst = std::max(worst, z);
    }
  return {worst <= 3.0, "15 marginals, worst |z| = " + fmt(worst, 3)};
}

struct Speeds {
  EdgeSpeedEstimate at2, at3, at4;
};

Outcome edge_speeds(Speeds& out) {
  ExperimentConfig cfg;
  cfg.edge_horizon = 200.0;
  cfg.edge_replicas = 200;
  cfg.threads = threads();
  out.at2 = edge_speed(cfg, 2.0);
  out.at3 = edge_speed(cfg, 3.0);
  out.at4 = edge_speed(cfg, 4.0);
  const bool ordered = out.at2.ci.high < out.at3.ci.low && out.at3.ci.high < out.at4.ci.low;
  const bool positive = out.at4.ci.low > 0.0;
  auto show = [](const EdgeSpeedEstimate& e) {
    return fmt(e.alpha_hat) + " [" + fmt(e.ci.low) + ", " + fmt(e.ci.high) + "]";
  };
  return {ordered && positive, "alpha(2)=" + show(out.at2) + " alpha(3)=" + show(out.at3) + " alpha(4)=" + show(out.at4)};
}

ExperimentConfig wedge_regime(const Speeds& s) {
  ExperimentConfig cfg;
  cfg.lambda = 4.0;
  cfg.alpha_hat = s.at4.alpha_hat;
  cfg.M = 40;
  cfg.m_list = {5, 10, 20, 40};
  cfg.horizon = 200.0;
  cfg.replicas = 300;
  cfg.threads = threads();
  return cfg;
}

Outcome survival(const Speeds& s) {
  auto cfg = wedge_regime(s);
  cfg.experiment = "survival-curve";
  const auto c = survival_curve(cfg);
  std::string d = "wedge (" + c.speeds.alpha_l.str() + ", " + c.speeds.alpha_r.str() + "), survival";
  for (const auto& p : c.points) d += " " + p.M.str() + ":" + fmt(p.survival.estimate, 3);
  d += ", paired violations " + std::to_string(c.monotonicity_violations);
  const bool pass = c.monotonicity_violations == 0 && c.nondecreasing && c.points.back().survival.estimate >= 0.9;
  return {pass, d};
}

Outcome coupling(const Speeds& s) {
  auto cfg = wedge_regime(s);
  cfg.experiment = "coupling-check";
  const auto c = coupling_check(cfg);
  const double ar = c.speeds.alpha_r.to_double();
  std::size_t identity = 0;
  for (const auto& cp : c.checkpoints) identity += cp.identity_violations;
  const double dis = c.checkpoints.back().disagreement;
  const bool ci_ok = c.right.interval.low >= 0.9 * ar && c.right.interval.high <= 1.1 * ar;
  const bool pass = !c.insufficient && dis <= 0.01 && ci_ok && identity == 0;
  return {pass, "survivors " + std::to_string(c.survivors) + ", final disagreement " + fmt(dis, 3) + ", r_T/T CI [" +
                    fmt(c.right.interval.low) + ", " + fmt(c.right.interval.high) + "] vs alpha_r " + fmt(ar) +
                    ", identity violations " + std::to_string(identity)};
}

Outcome lemma2() {
  ExperimentConfig cfg;
  cfg.experiment = "lemma2";
  cfg.lambda = 4.0;
  cfg.block_m_list = {8, 16, 24, 32};
  cfg.replicas = 300;
  cfg.threads = threads();
  const auto l = lemma2_check(cfg);
  std::string d = "P(O00)";
  for (const auto& p : l.points)
    d += " " + p.M.str() + ":" + fmt(p.o_event.estimate, 3) + (p.bound_holds ? "" : "(bound fails)");
  return {l.nondecreasing && l.all_bounds_hold, d};
}

Outcome coexistence(const Speeds& s) {
  ExperimentConfig cfg;
  cfg.experiment = "gbt-coexistence";
  cfg.lambda1 = 4.0;
  cfg.lambda2 = 2.0;
  cfg.alpha_hat = s.at4.alpha_hat;
  cfg.alpha_hat2 = s.at2.alpha_hat;
  cfg.horizon = 100.0;
  cfg.replicas = 500;
  cfg.threads = threads();
  const auto g = gbt_coexistence(cfg);
  const bool pass = g.ones.interval.low > 0.0 && g.product_within_3sigma;
  return {pass, "P(ones >= 10) = " + fmt(g.ones.estimate, 3) + " Wilson [" + fmt(g.ones.interval.low, 3) + ", " +
                    fmt(g.ones.interval.high, 3) + "], joint " + fmt(g.omega_all.estimate, 3) + " vs product " +
                    fmt(g.product, 3) + " (se " + fmt(g.product_std_error, 2) + ")"};
}

Outcome determinism() {
  std::vector<ExperimentConfig> cfgs;
  auto base = [](const std::string& id) {
    ExperimentConfig c;
    c.experiment = id;
    c.horizon = 20.0;
    c.replicas = 20;
    c.edge_horizon = 20.0;
    c.edge_replicas = 20;
    c.burn_in = 10.0;
    c.seed = 1234;
    return c;
  };
  for (const char* id : {"survival-curve", "edge-growth", "coupling-check", "edge-speed", "lemma2", "omega-infinity",
                         "gbt-coexistence", "lambda-c"})
    cfgs.push_back(base(id));
  cfgs[6].alpha_hat = 2.9;
  cfgs[6].alpha_hat2 = 0.7;
  cfgs[5].block_m_list = {4};
  cfgs[7].tolerance = 0.5;
  std::size_t same = 0;
  for (const auto& c : cfgs) {
    const std::string manifest = c.to_json().dump();
    const auto first = run_experiment(c);
    auto again_cfg = ExperimentConfig::from_json(nlohmann::json::parse(manifest));
    again_cfg.threads = threads();
    const auto second = run_experiment(again_cfg);
    bool eq = first.report.dump(2) == second.report.dump(2) && first.csv == second.csv;
    same += eq;
  }
  return {same == cfgs.size(), std::to_string(same) + "/" + std::to_string(cfgs.size()) + " experiments reproduce"};
}

}  // namespace

int main() {
  run(1, "exact geometry", 1.0, exact_geometry);
  run(2, "containment", 10.0, containment);
  run(3, "semantics equivalence", 30.0, semantics);
  run(4, "GBT oracle", 120.0, gbt_oracle);
  Speeds speeds;
  run(7, "edge-speed monotonicity", 600.0, [&] { return edge_speeds(speeds); });
  run(5, "wedge survival", 900.0, [&] { return survival(speeds); });
  run(6, "coupling", 900.0, [&] { return coupling(speeds); });
  run(8, "block events", 900.0, lemma2);
  run(9, "GBT coexistence", 900.0, [&] { return coexistence(speeds); });
  run(10, "determinism", 600.0, determinism);
  return failures == 0 ? 0 : 1;
}
