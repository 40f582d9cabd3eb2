#pragma once

// Replicated Monte Carlo experiments. Every experiment is a pure function of
// an ExperimentConfig: replicas use seeds derived from the master seed and the
// replica index, results are aggregated in replica order, and wall-clock data
// is kept apart from the report body.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "wedgecp/blocks.hpp"
#include "wedgecp/contact.hpp"
#include "wedgecp/errors.hpp"
#include "wedgecp/gbt.hpp"
#include "wedgecp/parallel.hpp"
#include "wedgecp/paths.hpp"
#include "wedgecp/rational.hpp"
#include "wedgecp/regions.hpp"
#include "wedgecp/rng.hpp"
#include "wedgecp/stats.hpp"
#include "wedgecp/timeline.hpp"

namespace wedgecp {

using Json = nlohmann::ordered_json;

// Nearest rational with the given denominator.
inline Rational approx_rational(double x, std::int64_t den = 1000) {
  return Rational(static_cast<std::int64_t>(std::llround(x * static_cast<double>(den))), den);
}

struct ExperimentConfig {
  std::string experiment = "survival-curve";

  // rates
  double lambda = 4.0;
  double lambda1 = 4.0;
  double lambda2 = 2.0;

  // wedge: absolute speeds, or fractions of the estimated edge speed
  std::optional<Rational> alpha_l;
  std::optional<Rational> alpha_r;
  Rational frac_l{3, 10};
  Rational frac_r{7, 10};
  std::optional<double> alpha_hat;   // edge speed at lambda (or lambda1)
  std::optional<double> alpha_hat2;  // edge speed at lambda2
  Rational M{40};
  std::vector<Rational> m_list{5, 10, 20, 40};

  // run sizes
  double horizon = 200.0;
  std::size_t replicas = 300;
  double burn_in = 50.0;
  std::optional<double> window_margin;
  std::int64_t left_depth = 100;
  double edge_horizon = 200.0;
  std::size_t edge_replicas = 200;
  std::vector<double> lambdas{2.0, 3.0, 4.0};

  // coupling growth window [a t, b t]; defaults to the wedge speeds
  std::optional<double> growth_a;
  std::optional<double> growth_b;

  // blocks
  std::int64_t ell = 2;
  std::int64_t d = 0;
  Rational block_alpha{2};
  Rational beta{1, 2};
  std::vector<Rational> block_m_list{4, 8, 16};
  std::int64_t rows = 2;
  bool from_solution = false;  // omega: derive (ell, d, beta) from the integer solution for (block_alpha, alpha_l, alpha_r)
  bool common_point = true;

  // GBT
  std::size_t threshold = 10;
  Rational omega_m{4};
  std::int64_t x0 = 10;
  double lambda_c_hint = 1.65;

  // critical value search
  double lambda_lo = 0.5;
  double lambda_hi = 4.0;
  double tolerance = 0.05;
  double survival_threshold = 0.25;

  std::uint64_t seed = 1;
  unsigned threads = 1;

  Json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  std::string hash() const;
  SeedKey key() const { return SeedKey{seed, 0}.child(experiment); }
  void validate() const;
};

namespace detail {

inline Json rationals_json(const std::vector<Rational>& v) {
  Json a = Json::array();
  for (const auto& r : v) a.push_back(r.str());
  return a;
}

inline std::vector<Rational> rationals_from(const nlohmann::json& j) {
  std::vector<Rational> out;
  for (const auto& e : j) out.push_back(e.is_string() ? Rational::parse(e.get<std::string>()) : Rational(e.get<std::int64_t>()));
  return out;
}

inline Rational rational_from(const nlohmann::json& e) {
  return e.is_string() ? Rational::parse(e.get<std::string>()) : Rational(e.get<std::int64_t>());
}

}  // namespace detail

inline Json ExperimentConfig::to_json() const {
  Json j;
  j["experiment"] = experiment;
  j["lambda"] = lambda;
  j["lambda1"] = lambda1;
  j["lambda2"] = lambda2;
  j["alpha_l"] = alpha_l ? Json(alpha_l->str()) : Json(nullptr);
  j["alpha_r"] = alpha_r ? Json(alpha_r->str()) : Json(nullptr);
  j["frac_l"] = frac_l.str();
  j["frac_r"] = frac_r.str();
  j["alpha_hat"] = alpha_hat ? Json(*alpha_hat) : Json(nullptr);
  j["alpha_hat2"] = alpha_hat2 ? Json(*alpha_hat2) : Json(nullptr);
  j["M"] = M.str();
  j["m_list"] = detail::rationals_json(m_list);
  j["horizon"] = horizon;
  j["replicas"] = replicas;
  j["burn_in"] = burn_in;
  j["window_margin"] = window_margin ? Json(*window_margin) : Json(nullptr);
  j["left_depth"] = left_depth;
  j["edge_horizon"] = edge_horizon;
  j["edge_replicas"] = edge_replicas;
  j["lambdas"] = lambdas;
  j["growth_a"] = growth_a ? Json(*growth_a) : Json(nullptr);
  j["growth_b"] = growth_b ? Json(*growth_b) : Json(nullptr);
  j["ell"] = ell;
  j["d"] = d;
  j["block_alpha"] = block_alpha.str();
  j["beta"] = beta.str();
  j["block_m_list"] = detail::rationals_json(block_m_list);
  j["rows"] = rows;
  j["from_solution"] = from_solution;
  j["common_point"] = common_point;
  j["threshold"] = threshold;
  j["omega_m"] = omega_m.str();
  j["x0"] = x0;
  j["lambda_c_hint"] = lambda_c_hint;
  j["lambda_lo"] = lambda_lo;
  j["lambda_hi"] = lambda_hi;
  j["tolerance"] = tolerance;
  j["survival_threshold"] = survival_threshold;
  j["seed"] = seed;
  j["threads"] = threads;
  return j;
}

inline ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  auto get = [&](const char* name, auto& field) {
    if (j.contains(name) && !j[name].is_null()) field = j[name].get<std::decay_t<decltype(field)>>();
  };
  auto get_opt = [&](const char* name, auto& field) {
    using T = typename std::decay_t<decltype(field)>::value_type;
    if (j.contains(name) && !j[name].is_null()) field = j[name].get<T>();
  };
  auto get_rat = [&](const char* name, Rational& field) {
    if (j.contains(name) && !j[name].is_null()) field = detail::rational_from(j[name]);
  };
  auto get_opt_rat = [&](const char* name, std::optional<Rational>& field) {
    if (j.contains(name) && !j[name].is_null()) field = detail::rational_from(j[name]);
  };
  auto get_list = [&](const char* name, std::vector<Rational>& field) {
    if (j.contains(name) && !j[name].is_null()) field = detail::rationals_from(j[name]);
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const char* known[] = {"experiment", "lambda", "lambda1", "lambda2", "alpha_l", "alpha_r", "frac_l",
                                  "frac_r", "alpha_hat", "alpha_hat2", "M", "m_list", "horizon", "replicas",
                                  "burn_in", "window_margin", "left_depth", "edge_horizon", "edge_replicas",
                                  "lambdas", "growth_a", "growth_b", "ell", "d", "block_alpha", "beta",
                                  "block_m_list", "rows", "from_solution", "common_point", "threshold", "omega_m",
                                  "x0", "lambda_c_hint", "lambda_lo", "lambda_hi", "tolerance",
                                  "survival_threshold", "seed", "threads", "config_hash"};
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return it.key() == k; }) ==
        std::end(known))
      throw InvalidArgument("unknown config key: " + it.key());
  }
  get("experiment", c.experiment);
  get("lambda", c.lambda);
  get("lambda1", c.lambda1);
  get("lambda2", c.lambda2);
  get_opt_rat("alpha_l", c.alpha_l);
  get_opt_rat("alpha_r", c.alpha_r);
  get_rat("frac_l", c.frac_l);
  get_rat("frac_r", c.frac_r);
  get_opt("alpha_hat", c.alpha_hat);
  get_opt("alpha_hat2", c.alpha_hat2);
  get_rat("M", c.M);
  get_list("m_list", c.m_list);
  get("horizon", c.horizon);
  get("replicas", c.replicas);
  get("burn_in", c.burn_in);
  get_opt("window_margin", c.window_margin);
  get("left_depth", c.left_depth);
  get("edge_horizon", c.edge_horizon);
  get("edge_replicas", c.edge_replicas);
  get("lambdas", c.lambdas);
  get_opt("growth_a", c.growth_a);
  get_opt("growth_b", c.growth_b);
  get("ell", c.ell);
  get("d", c.d);
  get_rat("block_alpha", c.block_alpha);
  get_rat("beta", c.beta);
  get_list("block_m_list", c.block_m_list);
  get("rows", c.rows);
  get("from_solution", c.from_solution);
  get("common_point", c.common_point);
  get("threshold", c.threshold);
  get_rat("omega_m", c.omega_m);
  get("x0", c.x0);
  get("lambda_c_hint", c.lambda_c_hint);
  get("lambda_lo", c.lambda_lo);
  get("lambda_hi", c.lambda_hi);
  get("tolerance", c.tolerance);
  get("survival_threshold", c.survival_threshold);
  get("seed", c.seed);
  get("threads", c.threads);
  return c;
}

// Hash of the configuration; thread count does not affect results and is excluded.
inline std::string ExperimentConfig::hash() const {
  Json j = to_json();
  j.erase("threads");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

inline void ExperimentConfig::validate() const {
  if (replicas < 1) throw InvalidArgument("replica count must be at least 1");
  if (!(horizon > 0.0)) throw InvalidArgument("horizon must be positive");
  if (!(lambda >= 0.0 && lambda1 >= 0.0 && lambda2 >= 0.0)) throw InvalidArgument("rates must be non-negative");
  if (!(burn_in > 0.0)) throw InvalidArgument("burn-in must be positive");
  if (window_margin && !(*window_margin >= 0.0)) throw InvalidArgument("window margin must be non-negative");
}

// ---------------------------------------------------------------------------

struct EstimateReport {
  double estimate = 0.0;
  double std_error = 0.0;
  stats::Interval interval;  // Wilson for proportions, normal theory for means
  bool proportion = false;
  std::size_t successes = 0;
  std::size_t replicas = 0;  // replicas entering the estimate
  std::size_t discarded = 0;

  static EstimateReport proportion_of(std::size_t successes, std::size_t trials, std::size_t discarded = 0) {
    EstimateReport r;
    r.proportion = true;
    r.successes = successes;
    r.replicas = trials;
    r.discarded = discarded;
    r.estimate = trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
    r.std_error = stats::proportion_se(successes, trials);
    r.interval = stats::wilson(successes, trials);
    return r;
  }

  static EstimateReport mean_of(std::span<const double> xs, std::size_t discarded = 0) {
    EstimateReport r;
    const auto s = stats::summarize(xs);
    r.replicas = s.n;
    r.discarded = discarded;
    r.estimate = s.mean;
    r.std_error = s.std_error();
    r.interval = s.normal_ci();
    return r;
  }

  Json to_json() const {
    Json j;
    j["estimate"] = estimate;
    j["std_error"] = std_error;
    j[proportion ? "wilson95" : "ci95"] = {interval.low, interval.high};
    if (proportion) j["successes"] = successes;
    j["replicas"] = replicas;
    j["discarded"] = discarded;
    return j;
  }
};

// A report body plus wall-clock data, kept apart for reproducibility.
struct ExperimentResult {
  Json report;
  double runtime_seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> csv;  // file name, contents
};

namespace detail {

inline Json reproducibility(const ExperimentConfig& cfg) {
  Json j;
  j["master_seed"] = cfg.seed;
  j["config_hash"] = cfg.hash();
  return j;
}

inline Json edge_json(const EdgeSpeedEstimate& e) {
  Json j;
  j["alpha_hat"] = e.alpha_hat;
  j["std_error"] = e.std_error;
  j["ci95"] = {e.ci.low, e.ci.high};
  j["replicas"] = e.replicas;
  j["used"] = e.used;
  j["discarded"] = e.discarded;
  j["extinct"] = e.extinct;
  j["window"] = {e.window.first, e.window.last};
  return j;
}

inline SiteWindow padded(SiteRange r) { return {r.first - 1, r.last + 1}; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Edge speeds and wedge speeds.

inline EdgeSpeedEstimate edge_speed(const ExperimentConfig& cfg, double lambda) {
  EdgeSpeedOptions opts;
  opts.right_margin = cfg.window_margin;
  opts.left_depth = cfg.left_depth;
  opts.threads = cfg.threads;
  // Seeds depend on lambda so that different rates use independent replicas.
  const SeedKey key = SeedKey{cfg.seed, 0}.child("edge-speed").child(static_cast<std::uint64_t>(std::llround(lambda * 1e6)));
  return estimate_edge_speed(lambda, cfg.edge_horizon, cfg.edge_replicas, key, opts);
}

struct WedgeSpeeds {
  double alpha_hat = 0.0;
  std::optional<EdgeSpeedEstimate> estimate;  // when alpha_hat was estimated here
  Rational alpha_l;
  Rational alpha_r;
  std::vector<std::string> warnings;

  Json to_json() const {
    Json j;
    j["alpha_hat"] = alpha_hat;
    j["alpha_hat_source"] = estimate ? "estimated" : "configured";
    if (estimate) j["edge_speed"] = detail::edge_json(*estimate);
    j["alpha_l"] = alpha_l.str();
    j["alpha_r"] = alpha_r.str();
    return j;
  }
};

inline WedgeSpeeds resolve_speeds(const ExperimentConfig& cfg, double lambda) {
  WedgeSpeeds w;
  if (cfg.alpha_hat) {
    w.alpha_hat = *cfg.alpha_hat;
  } else if (!(cfg.alpha_l && cfg.alpha_r)) {
    w.estimate = edge_speed(cfg, lambda);
    w.alpha_hat = w.estimate->alpha_hat;
  }
  w.alpha_l = cfg.alpha_l.value_or(approx_rational(cfg.frac_l.to_double() * w.alpha_hat));
  w.alpha_r = cfg.alpha_r.value_or(approx_rational(cfg.frac_r.to_double() * w.alpha_hat));
  if (!(Rational(0) < w.alpha_l && w.alpha_l < w.alpha_r))
    throw InvalidArgument("wedge speeds need 0 < alpha_l < alpha_r (alpha_hat=" + std::to_string(w.alpha_hat) + ")");
  if (w.estimate && w.alpha_r.to_double() >= w.estimate->ci.high)
    w.warnings.push_back("alpha_r is not below the edge-speed confidence interval");
  if (!w.estimate && cfg.alpha_hat && w.alpha_r.to_double() >= *cfg.alpha_hat)
    w.warnings.push_back("alpha_r is not below the configured edge speed");
  return w;
}

// ---------------------------------------------------------------------------
// Survival in wedges.

struct SurvivalPoint {
  Rational M;
  EstimateReport survival;
};

struct SurvivalCurve {
  WedgeSpeeds speeds;
  std::vector<SurvivalPoint> points;
  std::size_t monotonicity_violations = 0;  // replica pairs with survival at M but not at a larger M'
  bool nondecreasing = false;               // point estimates nondecreasing in M
};

// Survival to the horizon of the wedge-restricted process from [0, M], for each
// M on a common timeline per replica.
inline SurvivalCurve survival_curve(const ExperimentConfig& cfg) {
  cfg.validate();
  SurvivalCurve out;
  out.speeds = resolve_speeds(cfg, cfg.lambda);
  std::vector<Rational> ms = cfg.m_list;
  std::sort(ms.begin(), ms.end());
  if (ms.empty() || ms.front() < 0) throw InvalidArgument("M list must be nonempty and non-negative");
  const Rational T = approx_rational(cfg.horizon, 1'000'000);
  const SiteWindow window = detail::padded({0, (ms.back() + out.speeds.alpha_r * T).floor()});
  const SeedKey key = cfg.key();

  auto rows = run_replicas(cfg.replicas, cfg.threads, [&](std::size_t i) {
    const EventTimeline tl = EventTimeline::build(window, cfg.horizon, cfg.lambda, 0.0, key.child(i));
    std::vector<std::uint8_t> alive;
    EvolveOptions opts;
    opts.record = false;
    for (const auto& m : ms) {
      const Wedge w(out.speeds.alpha_l, out.speeds.alpha_r, m);
      alive.push_back(evolve(tl, w, Configuration::interval(0, m.floor()), opts).survived());
    }
    return alive;
  });

  for (std::size_t a = 0; a < ms.size(); ++a) {
    std::size_t s = 0;
    for (const auto& r : rows) s += r[a];
    out.points.push_back({ms[a], EstimateReport::proportion_of(s, cfg.replicas)});
  }
  for (const auto& r : rows)
    for (std::size_t a = 0; a < ms.size(); ++a)
      for (std::size_t b = a + 1; b < ms.size(); ++b)
        if (r[a] && !r[b]) ++out.monotonicity_violations;
  out.nondecreasing = true;
  for (std::size_t a = 1; a < out.points.size(); ++a)
    if (out.points[a].survival.estimate < out.points[a - 1].survival.estimate) out.nondecreasing = false;
  return out;
}

// ---------------------------------------------------------------------------
// Edge growth in a wedge and in the half-space.

struct EdgeGrowth {
  WedgeSpeeds speeds;
  std::size_t survivors = 0;
  bool insufficient = false;
  EstimateReport right;      // r_T / T among survivors
  EstimateReport left;       // l_T / T among survivors
  EstimateReport half_space;  // right edge of the half-space process / T
  double right_relative_error = 0.0;
  double left_relative_error = 0.0;
  std::size_t edge_touched = 0;
};

inline EdgeGrowth edge_growth_check(const ExperimentConfig& cfg) {
  cfg.validate();
  EdgeGrowth out;
  out.speeds = resolve_speeds(cfg, cfg.lambda);
  const Rational T = approx_rational(cfg.horizon, 1'000'000);
  const Rational& al = out.speeds.alpha_l;
  const Rational& ar = out.speeds.alpha_r;
  const SiteWindow window = detail::padded({-cfg.left_depth, (cfg.M + ar * T).floor()});
  const SeedKey key = cfg.key();

  struct One {
    bool survived = false;
    bool touched = false;
    double r = 0.0, l = 0.0, rbar = 0.0;
  };
  auto rows = run_replicas(cfg.replicas, cfg.threads, [&](std::size_t i) {
    const EventTimeline tl = EventTimeline::build(window, cfg.horizon, cfg.lambda, 0.0, key.child(i));
    EvolveOptions opts;
    opts.record = false;
    One o;
    const Trajectory w = evolve(tl, Wedge(al, ar, cfg.M), Configuration::interval(0, cfg.M.floor()), opts);
    const Trajectory h = evolve(tl, HalfSpace(ar, cfg.M), Configuration::left_half_line(cfg.M.floor()), opts);
    o.touched = h.edge_touched();
    if (!h.final_sites.empty()) o.rbar = static_cast<double>(h.final_sites.back()) / cfg.horizon;
    if (w.survived()) {
      o.survived = true;
      o.r = static_cast<double>(w.final_sites.back()) / cfg.horizon;
      o.l = static_cast<double>(w.final_sites.front()) / cfg.horizon;
    }
    return o;
  });
  std::vector<double> rs, ls, rbars;
  for (const auto& o : rows) {
    if (o.touched) ++out.edge_touched;
    else rbars.push_back(o.rbar);
    if (!o.survived) continue;
    rs.push_back(o.r);
    ls.push_back(o.l);
  }
  out.survivors = rs.size();
  out.insufficient = out.survivors < 30;
  out.right = EstimateReport::mean_of(rs);
  out.left = EstimateReport::mean_of(ls);
  out.half_space = EstimateReport::mean_of(rbars, out.edge_touched);
  out.right_relative_error = std::fabs(out.right.estimate - ar.to_double()) / ar.to_double();
  out.left_relative_error = std::fabs(out.left.estimate - al.to_double()) / al.to_double();
  return out;
}

// ---------------------------------------------------------------------------
// Coupling with the (approximate) upper invariant measure.

struct CouplingCheckpoint {
  double t = 0.0;
  std::size_t survivors = 0;
  double disagreement = 0.0;  // pooled fraction of sites in [l, r] where the wedge and nu processes differ
  std::size_t sites_compared = 0;
  std::size_t identity_violations = 0;  // sites in [l, r] where the wedge and half-space processes differ
  double nu_growth = 0.0;  // mean |xi^nu_t within [a t, b t]|
};

struct CouplingCheck {
  WedgeSpeeds speeds;
  double growth_a = 0.0;
  double growth_b = 0.0;
  std::vector<CouplingCheckpoint> checkpoints;
  std::size_t survivors = 0;
  bool insufficient = false;
  EstimateReport right;  // r_T / T among survivors
  double right_relative_error = 0.0;
  std::size_t nu_edge_touched = 0;
};

inline CouplingCheck coupling_check(const ExperimentConfig& cfg) {
  cfg.validate();
  CouplingCheck out;
  out.speeds = resolve_speeds(cfg, cfg.lambda);
  const Rational T = approx_rational(cfg.horizon, 1'000'000);
  const Rational& al = out.speeds.alpha_l;
  const Rational& ar = out.speeds.alpha_r;
  out.growth_a = cfg.growth_a.value_or(al.to_double());
  out.growth_b = cfg.growth_b.value_or(ar.to_double());
  // The nu process agrees with the process from all of Z on its own [l, r],
  // which fills the window up to O(1) sites; a modest margin suffices.
  const auto margin = static_cast<Site>(std::ceil(cfg.window_margin.value_or(50.0)));
  const SiteWindow window{-margin, (cfg.M + ar * T).floor() + margin};
  const std::vector<double> times{0.0, cfg.horizon / 4, cfg.horizon / 2, cfg.horizon};
  const SeedKey key = cfg.key();

  struct Point {
    bool survived = false;
    std::size_t compared = 0, differ = 0, identity = 0, growth = 0;
  };
  struct One {
    std::vector<Point> points;
    double r = 0.0;
    bool survived = false;
    bool nu_touched = false;
  };
  auto rows = run_replicas(cfg.replicas, cfg.threads, [&](std::size_t i) {
    const SeedKey rk = key.child(i);
    const EventTimeline tl = EventTimeline::build(window, cfg.horizon, cfg.lambda, 0.0, rk);
    const InvariantSample nu = sample_upper_invariant(cfg.lambda, window, cfg.burn_in, rk.child("nu"));
    const Trajectory w = evolve(tl, Wedge(al, ar, cfg.M), Configuration::interval(0, cfg.M.floor()));
    const Trajectory v = evolve(tl, FullSpace{}, nu.configuration);
    const Trajectory h = evolve(tl, HalfSpace(ar, cfg.M), Configuration::left_half_line(cfg.M.floor()));
    One o;
    o.survived = w.survived();
    if (o.survived) o.r = static_cast<double>(w.final_sites.back()) / cfg.horizon;
    for (double t : times) {
      Point p;
      const auto sw = w.state_at(t);
      if (!sw.empty()) {
        p.survived = true;
        const auto sv = v.state_at(t);
        const auto sh = h.state_at(t);
        const Site l = sw.front(), r = sw.back();
        auto in = [](const std::vector<Site>& s, Site x) { return std::binary_search(s.begin(), s.end(), x); };
        for (Site x = l; x <= r; ++x) {
          const bool a = in(sw, x);
          ++p.compared;
          if (a != in(sv, x)) ++p.differ;
          if (a != in(sh, x)) ++p.identity;
        }
      }
      const double lo = out.growth_a * t, hi = out.growth_b * t;
      const auto sv = v.state_at(t);
      p.growth = static_cast<std::size_t>(std::count_if(sv.begin(), sv.end(), [&](Site x) {
        return static_cast<double>(x) >= lo && static_cast<double>(x) <= hi;
      }));
      o.points.push_back(p);
    }
    o.nu_touched = false;
    return o;
  });

  std::vector<double> rs;
  for (const auto& o : rows)
    if (o.survived) rs.push_back(o.r);
  out.survivors = rs.size();
  out.insufficient = out.survivors < 30;
  out.right = EstimateReport::mean_of(rs);
  out.right_relative_error = std::fabs(out.right.estimate - ar.to_double()) / ar.to_double();
  for (std::size_t c = 0; c < times.size(); ++c) {
    CouplingCheckpoint cp;
    cp.t = times[c];
    std::size_t differ = 0, growth = 0;
    for (const auto& o : rows) {
      const Point& p = o.points[c];
      growth += p.growth;
      // Survivors are replicas whose wedge process is alive at the horizon.
      if (!o.survived || !p.survived) continue;
      ++cp.survivors;
      cp.sites_compared += p.compared;
      differ += p.differ;
      cp.identity_violations += p.identity;
    }
    cp.disagreement = cp.sites_compared ? static_cast<double>(differ) / static_cast<double>(cp.sites_compared) : 0.0;
    cp.nu_growth = static_cast<double>(growth) / static_cast<double>(rows.size());
    out.checkpoints.push_back(cp);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Block events.

struct BlockGeometry {
  std::int64_t ell = 2;
  std::int64_t d = 0;
  Rational alpha;
  Rational beta;
  std::optional<IntegerSolution> solution;
};

inline BlockGeometry block_geometry(const ExperimentConfig& cfg) {
  BlockGeometry g{cfg.ell, cfg.d, cfg.block_alpha, cfg.beta, std::nullopt};
  if (cfg.from_solution) {
    if (!(cfg.alpha_l && cfg.alpha_r)) throw InvalidArgument("integer solution needs alpha_l and alpha_r");
    const IntegerSolution s = solve_integer_wedge(cfg.block_alpha, *cfg.alpha_l, *cfg.alpha_r);
    g = {s.ell_prime, s.d_prime, s.alpha, s.beta, s};
  }
  return g;
}

namespace detail {

// Timeline window and horizon covering every region in `regions`.
struct Cover {
  SiteWindow window{0, -1};
  Rational top{0};

  void add(SiteRange r, const Rational& t) {
    if (window.empty()) {
      window = {r.first, r.last};
    } else {
      window.first = std::min(window.first, r.first);
      window.last = std::max(window.last, r.last);
    }
    top = max(top, t);
  }
  double horizon() const { return std::max(1.0, static_cast<double>(top.ceil())); }
};

// Whether one bottom-edge site of y reaches the top edge of every
// parallelogram of y by active paths inside y.
inline bool common_bottom_point(const EventTimeline& tl, const YRegion& y) {
  const Region region = y.as_union();
  const SiteRange bottom = y.base().bottom_sites();
  for (Site x = bottom.first; x <= bottom.last; ++x) {
    bool all = true;
    for (const auto& part : y.parts) {
      const auto& p = part.shape;
      const auto reached = reachable_sites(tl, region, {x}, ExactTime::from_rational(y.bottom_time()),
                                           ExactTime::from_rational(p.top_time()));
      const SiteRange top = p.top_sites();
      if (std::none_of(reached.begin(), reached.end(), [&](Site s) { return top.first <= s && s <= top.last; })) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

}  // namespace detail

struct Lemma2Point {
  Rational M;
  std::size_t parallelograms = 0;  // enumerated n
  EstimateReport o_event;
  EstimateReport e_event;  // crossings of both R_00 and L_00
  double bound = 0.0;      // P(E)^n
  double bound_tolerance = 0.0;
  bool bound_holds = false;
  std::size_t common_point = 0;  // replicas with O_00 and a common bottom point
};

struct Lemma2Check {
  BlockGeometry geometry;
  std::vector<Lemma2Point> points;
  bool nondecreasing = false;
  std::vector<double> paired_difference_z;  // between consecutive M values
  bool all_bounds_hold = false;
};

inline Lemma2Check lemma2_check(const ExperimentConfig& cfg) {
  cfg.validate();
  Lemma2Check out;
  out.geometry = block_geometry(cfg);
  const auto& g = out.geometry;
  std::vector<Rational> ms = cfg.block_m_list;
  std::sort(ms.begin(), ms.end());
  if (ms.empty()) throw InvalidArgument("M list must be nonempty");

  std::vector<YRegion> ys;
  std::vector<Parallelogram> l00s;
  detail::Cover cover;
  for (const auto& m : ms) {
    ys.push_back(assemble_y_region(g.ell, g.d, m, g.alpha, g.beta));
    l00s.push_back(make_parallelogram(ParallelogramKind::kL, 0, 0, m, g.alpha, g.beta));
    cover.add(ys.back().site_extent(), ys.back().top_time());
    cover.add(l00s.back().site_extent(), l00s.back().top_time());
  }
  const SiteWindow window = detail::padded({cover.window.first, cover.window.last});
  const SeedKey key = cfg.key();

  struct One {
    std::vector<std::uint8_t> o, e, common;
  };
  auto rows = run_replicas(cfg.replicas, cfg.threads, [&](std::size_t i) {
    const EventTimeline tl = EventTimeline::build(window, cover.horizon(), cfg.lambda, 0.0, key.child(i));
    One r;
    for (std::size_t a = 0; a < ms.size(); ++a) {
      const auto c = crossings(tl, ys[a]);
      const bool o = std::all_of(c.begin(), c.end(), [](bool b) { return b; });
      r.o.push_back(o);
      r.e.push_back(c.front() && crossing_event(tl, l00s[a]));
      r.common.push_back(o && cfg.common_point && detail::common_bottom_point(tl, ys[a]));
    }
    return r;
  });

  out.all_bounds_hold = true;
  for (std::size_t a = 0; a < ms.size(); ++a) {
    Lemma2Point p;
    p.M = ms[a];
    p.parallelograms = ys[a].size();
    std::size_t so = 0, se = 0;
    for (const auto& r : rows) {
      so += r.o[a];
      se += r.e[a];
      p.common_point += r.common[a];
    }
    p.o_event = EstimateReport::proportion_of(so, cfg.replicas);
    p.e_event = EstimateReport::proportion_of(se, cfg.replicas);
    const double n = static_cast<double>(p.parallelograms);
    const double pe = p.e_event.estimate;
    p.bound = std::pow(pe, n);
    const double bound_se = n * std::pow(pe, n - 1) * p.e_event.std_error;
    p.bound_tolerance = 3.0 * std::sqrt(p.o_event.std_error * p.o_event.std_error + bound_se * bound_se);
    p.bound_holds = p.o_event.estimate >= p.bound - p.bound_tolerance;
    out.all_bounds_hold = out.all_bounds_hold && p.bound_holds;
    out.points.push_back(p);
  }
  out.nondecreasing = true;
  for (std::size_t a = 1; a < ms.size(); ++a) {
    if (out.points[a].o_event.estimate < out.points[a - 1].o_event.estimate) out.nondecreasing = false;
    std::vector<double> diff;
    for (const auto& r : rows) diff.push_back(static_cast<double>(r.o[a]) - static_cast<double>(r.o[a - 1]));
    const auto s = stats::summarize(diff);
    out.paired_difference_z.push_back(s.std_error() > 0 ? s.mean / s.std_error() : 0.0);
  }
  return out;
}

struct OmegaPoint {
  Rational M;
  EstimateReport open_path;
  EstimateReport o00;
  std::size_t graphical_checked = 0;
  std::size_t graphical_failures = 0;  // open lattice path without an active graphical path
};

struct OmegaCheck {
  BlockGeometry geometry;
  std::int64_t rows = 0;
  std::vector<OmegaPoint> points;
  bool nondecreasing = false;
};

inline OmegaCheck omega_infinity_check(const ExperimentConfig& cfg) {
  cfg.validate();
  OmegaCheck out;
  out.geometry = block_geometry(cfg);
  out.rows = cfg.rows;
  const auto& g = out.geometry;
  std::vector<Rational> ms = cfg.block_m_list;
  std::sort(ms.begin(), ms.end());
  if (ms.empty()) throw InvalidArgument("M list must be nonempty");

  std::vector<YRegion> ys;
  detail::Cover cover;
  for (const auto& m : ms) {
    ys.push_back(assemble_y_region(g.ell, g.d, m, g.alpha, g.beta));
    const FieldExtent f = field_extent(ys.back(), cfg.rows);
    cover.add(f.sites, f.top_time);
  }
  const SiteWindow window = detail::padded({cover.window.first, cover.window.last});
  const SeedKey key = cfg.key();

  struct One {
    std::vector<std::uint8_t> open, o00, checked, failed;
  };
  auto rows = run_replicas(cfg.replicas, cfg.threads, [&](std::size_t i) {
    const EventTimeline tl = EventTimeline::build(window, cover.horizon(), cfg.lambda, 0.0, key.child(i));
    One r;
    for (const auto& y : ys) {
      const PercolationField field = percolation_field(tl, y, cfg.rows);
      const auto path = find_open_path(field);
      r.open.push_back(path.has_value());
      r.o00.push_back(field.open({0, 0}));
      const bool check = path && path->size() > 1;
      r.checked.push_back(check);
      r.failed.push_back(check && !graphical_path_along(tl, y, *path));
    }
    return r;
  });
  for (std::size_t a = 0; a < ms.size(); ++a) {
    OmegaPoint p;
    p.M = ms[a];
    std::size_t so = 0, s00 = 0;
    for (const auto& r : rows) {
      so += r.open[a];
      s00 += r.o00[a];
      p.graphical_checked += r.checked[a];
      p.graphical_failures += r.failed[a];
    }
    p.open_path = EstimateReport::proportion_of(so, cfg.replicas);
    p.o00 = EstimateReport::proportion_of(s00, cfg.replicas);
    out.points.push_back(p);
  }
  out.nondecreasing = true;
  for (std::size_t a = 1; a < out.points.size(); ++a)
    if (out.points[a].open_path.estimate < out.points[a - 1].open_path.estimate) out.nondecreasing = false;
  return out;
}

// ---------------------------------------------------------------------------
// Weak coexistence in the GBT process.

struct GbtCoexistence {
  double alpha_hat1 = 0.0;
  double alpha_hat2 = 0.0;
  Rational alpha_l;
  Rational alpha_r;
  Rational omega_m;
  std::int64_t x0 = 0;
  Rational t0;
  std::vector<std::string> warnings;
  EstimateReport ones;  // P(||zeta_T||_1 >= threshold) among untouched replicas
  EstimateReport omega1, omega2, omega3, omega_all;
  double product = 0.0;
  double product_difference = 0.0;
  double product_std_error = 0.0;
  bool product_within_3sigma = false;
  std::size_t implication_failures = 0;  // Omega_1..3 all hold but ||zeta_T||_1 < threshold
};

namespace detail {

// Whether a site in state 2 ever occupies a point of `region` before `end`.
inline bool twos_enter(const GbtTrajectory& traj, const Region& region, double end) {
  const SiteWindow w = traj.window;
  std::vector<double> since(w.size(), -1.0);
  for (std::size_t i = 0; i < traj.initial.size(); ++i)
    if (traj.initial[i] == 2) since[i] = 0.0;
  auto overlaps = [&](Site x, double a, double b, bool closed_end) {
    for (const auto& iv : site_intervals(region, x)) {
      const ExactTime lo = ExactTime::from_rational(iv.lo);
      const ExactTime hi = iv.hi ? ExactTime::from_rational(*iv.hi) : ExactTime::infinity();
      if (le(a, hi) && (closed_end ? ge(b, lo) : gt(b, lo))) return true;
    }
    return false;
  };
  for (const auto& c : traj.changes) {
    const std::size_t i = static_cast<std::size_t>(c.x - w.first);
    if (c.state == 2) {
      since[i] = c.t;
    } else if (since[i] >= 0.0) {
      if (overlaps(c.x, since[i], c.t, false)) return true;
      since[i] = -1.0;
    }
  }
  for (std::size_t i = 0; i < since.size(); ++i)
    if (since[i] >= 0.0 && overlaps(w.first + static_cast<Site>(i), since[i], end, true)) return true;
  return false;
}

}  // namespace detail

inline GbtCoexistence gbt_coexistence(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!(cfg.lambda1 > cfg.lambda2 && cfg.lambda2 > 0.0))
    throw InvalidArgument("GBT coexistence requires lambda1 > lambda2 > 0");
  GbtCoexistence out;
  if (cfg.lambda2 <= cfg.lambda_c_hint)
    out.warnings.push_back("lambda2 is not above the simulated critical value estimate");
  out.alpha_hat1 = cfg.alpha_hat ? *cfg.alpha_hat : edge_speed(cfg, cfg.lambda1).alpha_hat;
  out.alpha_hat2 = cfg.alpha_hat2 ? *cfg.alpha_hat2 : edge_speed(cfg, cfg.lambda2).alpha_hat;
  const double gap = out.alpha_hat1 - out.alpha_hat2;
  out.alpha_l = cfg.alpha_l.value_or(approx_rational(out.alpha_hat2 + gap / 3, 100));
  out.alpha_r = cfg.alpha_r.value_or(approx_rational(out.alpha_hat2 + 2 * gap / 3, 100));
  if (!(Rational(0) < out.alpha_l && out.alpha_l < out.alpha_r))
    throw InvalidArgument("GBT wedge needs 0 < alpha_l < alpha_r");
  if (!(out.alpha_hat2 < out.alpha_l.to_double() && out.alpha_r.to_double() < out.alpha_hat1))
    out.warnings.push_back("wedge speeds are not strictly between the two edge speeds");
  out.omega_m = cfg.omega_m;
  if (!(out.omega_m > 2)) throw InvalidArgument("the coexistence wedge needs M > 2");
  out.x0 = cfg.x0;
  if (out.x0 <= 0) throw InvalidArgument("x0 must be positive");
  out.t0 = Rational(out.x0) / out.alpha_l;
  if (!(out.t0.to_double() < cfg.horizon)) throw InvalidArgument("t0 = x0 / alpha_l must lie before the horizon");

  const Wedge wedge(out.alpha_l, out.alpha_r, out.omega_m);
  // (0,0) is the corner of the wedge and the left boundary moves right at once,
  // so the first two events use the wedge widened by half a site on the left.
  const Wedge seed_wedge(out.alpha_l, out.alpha_r, out.omega_m + Rational(1, 2), Rational(-1, 2));
  const double margin = cfg.window_margin.value_or(2.0 * (cfg.lambda1 + 1.0) * cfg.horizon);
  const SiteWindow window{-cfg.left_depth, static_cast<Site>(std::ceil(margin))};
  const double p = (cfg.lambda1 - cfg.lambda2) / cfg.lambda1;
  const ExactTime t0 = ExactTime::from_rational(out.t0);
  const double mid = 0.5 * (out.t0.to_double() + cfg.horizon);
  const SeedKey key = cfg.key();

  struct One {
    bool touched = false;
    bool ones = false;
    bool o1 = false, o2 = false, o3 = false;
  };
  auto rows = run_replicas(cfg.replicas, cfg.threads, [&](std::size_t i) {
    const EventTimeline tl = EventTimeline::build(window, cfg.horizon, cfg.lambda1, p, key.child(i));
    One o;
    const GbtTrajectory z = evolve_gbt(tl, cfg.lambda1, cfg.lambda2, GbtConfiguration::trees_left_bush_at(0));
    o.touched = z.edge_touched();
    o.ones = z.final_count(1) >= cfg.threshold;
    o.o1 = !detail::twos_enter(z, seed_wedge, cfg.horizon);
    const auto at_t0 = reachable_sites(tl, seed_wedge, {0}, ExactTime::from_double(0.0), t0);
    o.o2 = true;
    for (Site x = out.x0; x <= out.x0 + out.omega_m.floor(); ++x)
      if (!std::binary_search(at_t0.begin(), at_t0.end(), x)) o.o2 = false;
    EvolveOptions opts;
    opts.start = t0;
    const Trajectory a = evolve(tl, wedge, Configuration::interval(out.x0, out.x0 + out.omega_m.floor()), opts);
    o.o3 = a.final_sites.size() >= cfg.threshold && a.state_at(mid).size() >= cfg.threshold;
    return o;
  });

  std::vector<const One*> used;
  std::size_t discarded = 0;
  for (const auto& o : rows) {
    if (o.touched) {
      ++discarded;
    } else {
      used.push_back(&o);
    }
  }
  if (static_cast<double>(discarded) > 0.1 * static_cast<double>(rows.size()))
    throw WindowTooSmall("more than 10% of GBT replicas touched the window edge");
  std::size_t s1 = 0, s2 = 0, s3 = 0, sall = 0, sones = 0;
  for (const One* o : used) {
    s1 += o->o1;
    s2 += o->o2;
    s3 += o->o3;
    sall += o->o1 && o->o2 && o->o3;
    sones += o->ones;
    if (o->o1 && o->o2 && o->o3 && !o->ones) ++out.implication_failures;
  }
  const std::size_t n = used.size();
  out.ones = EstimateReport::proportion_of(sones, n, discarded);
  out.omega1 = EstimateReport::proportion_of(s1, n, discarded);
  out.omega2 = EstimateReport::proportion_of(s2, n, discarded);
  out.omega3 = EstimateReport::proportion_of(s3, n, discarded);
  out.omega_all = EstimateReport::proportion_of(sall, n, discarded);
  const double p1 = out.omega1.estimate, p2 = out.omega2.estimate, p3 = out.omega3.estimate;
  out.product = p1 * p2 * p3;
  out.product_difference = out.omega_all.estimate - out.product;
  // Delta method: influence of each replica on p123 - p1 p2 p3.
  std::vector<double> psi;
  for (const One* o : used)
    psi.push_back(static_cast<double>(o->o1 && o->o2 && o->o3) -
                  (static_cast<double>(o->o1) * p2 * p3 + p1 * static_cast<double>(o->o2) * p3 +
                   p1 * p2 * static_cast<double>(o->o3)));
  out.product_std_error = stats::summarize(psi).std_error();
  out.product_within_3sigma = std::fabs(out.product_difference) <= 3.0 * out.product_std_error + 1e-12;
  return out;
}

// ---------------------------------------------------------------------------
// Finite-time proxy for the critical value.

struct LambdaProbe {
  double lambda = 0.0;
  EstimateReport survival;
};

struct LambdaCEstimate {
  double lambda_c_hat = 0.0;
  double low = 0.0;
  double high = 0.0;
  std::vector<LambdaProbe> probes;  // in evaluation order
};

inline EstimateReport single_site_survival(const ExperimentConfig& cfg, double lambda) {
  const double margin = cfg.window_margin.value_or(2.0 * (lambda + 1.0) * cfg.horizon);
  const auto w = static_cast<Site>(std::ceil(margin));
  const SiteWindow window{-w, w};
  const SeedKey key = cfg.key();
  auto rows = run_replicas(cfg.replicas, cfg.threads, [&](std::size_t i) {
    const EventTimeline tl = EventTimeline::build(window, cfg.horizon, lambda, 0.0, key.child(i));
    EvolveOptions opts;
    opts.record = false;
    const Trajectory t = evolve(tl, FullSpace{}, Configuration::single(0), opts);
    return std::pair<bool, bool>{t.survived(), t.edge_touched()};
  });
  std::size_t s = 0, touched = 0;
  for (const auto& [alive, edge] : rows) {
    if (edge) {
      ++touched;
      continue;
    }
    s += alive;
  }
  return EstimateReport::proportion_of(s, rows.size() - touched, touched);
}

inline LambdaCEstimate estimate_lambda_c(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!(cfg.tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (!(cfg.lambda_lo < cfg.lambda_hi)) throw InvalidArgument("need lambda_lo < lambda_hi");
  LambdaCEstimate out;
  double lo = cfg.lambda_lo, hi = cfg.lambda_hi;
  auto probe = [&](double lambda) {
    out.probes.push_back({lambda, single_site_survival(cfg, lambda)});
    return out.probes.back().survival.estimate >= cfg.survival_threshold;
  };
  if (probe(lo)) hi = lo;
  if (!probe(hi)) lo = hi;
  while (hi - lo > cfg.tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.low = lo;
  out.high = hi;
  out.lambda_c_hat = 0.5 * (lo + hi);
  return out;
}

// ---------------------------------------------------------------------------
// Reports.

namespace detail {

inline Json warnings_json(const std::vector<std::string>& w) {
  Json a = Json::array();
  for (const auto& s : w) a.push_back(s);
  return a;
}

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline Json to_json(const SurvivalCurve& s) {
  Json j;
  j["speeds"] = s.speeds.to_json();
  j["warnings"] = detail::warnings_json(s.speeds.warnings);
  Json pts = Json::array();
  for (const auto& p : s.points) {
    Json e = p.survival.to_json();
    e["M"] = p.M.str();
    pts.push_back(e);
  }
  j["points"] = pts;
  j["paired_monotonicity_violations"] = s.monotonicity_violations;
  j["nondecreasing"] = s.nondecreasing;
  return j;
}

inline Json to_json(const EdgeGrowth& e) {
  Json j;
  j["speeds"] = e.speeds.to_json();
  j["warnings"] = detail::warnings_json(e.speeds.warnings);
  j["survivors"] = e.survivors;
  j["insufficient_data"] = e.insufficient;
  j["right_edge_speed"] = e.right.to_json();
  j["left_edge_speed"] = e.left.to_json();
  j["half_space_right_edge_speed"] = e.half_space.to_json();
  j["right_relative_error"] = e.right_relative_error;
  j["left_relative_error"] = e.left_relative_error;
  j["half_space_edge_touched"] = e.edge_touched;
  return j;
}

inline Json to_json(const CouplingCheck& c) {
  Json j;
  j["speeds"] = c.speeds.to_json();
  j["warnings"] = detail::warnings_json(c.speeds.warnings);
  j["growth_window"] = {c.growth_a, c.growth_b};
  j["survivors"] = c.survivors;
  j["insufficient_data"] = c.insufficient;
  j["right_edge_speed"] = c.right.to_json();
  j["right_relative_error"] = c.right_relative_error;
  Json cps = Json::array();
  for (const auto& p : c.checkpoints) {
    Json e;
    e["t"] = p.t;
    e["survivors"] = p.survivors;
    e["sites_compared"] = p.sites_compared;
    e["disagreement"] = p.disagreement;
    e["nearest_neighbor_identity_violations"] = p.identity_violations;
    e["nu_growth"] = p.nu_growth;
    cps.push_back(e);
  }
  j["checkpoints"] = cps;
  return j;
}

inline Json to_json(const BlockGeometry& g) {
  Json j;
  j["ell"] = g.ell;
  j["d"] = g.d;
  j["alpha"] = g.alpha.str();
  j["beta"] = g.beta.str();
  if (g.solution) {
    j["solution"] = {{"m", g.solution->m}, {"c", g.solution->c}};
  }
  return j;
}

inline Json to_json(const Lemma2Check& l) {
  Json j;
  j["geometry"] = to_json(l.geometry);
  Json pts = Json::array();
  for (const auto& p : l.points) {
    Json e;
    e["M"] = p.M.str();
    e["parallelograms"] = p.parallelograms;
    e["o_event"] = p.o_event.to_json();
    e["e_event"] = p.e_event.to_json();
    e["bound"] = p.bound;
    e["bound_tolerance"] = p.bound_tolerance;
    e["bound_holds"] = p.bound_holds;
    e["common_bottom_point"] = p.common_point;
    pts.push_back(e);
  }
  j["points"] = pts;
  j["nondecreasing"] = l.nondecreasing;
  j["paired_difference_z"] = l.paired_difference_z;
  j["all_bounds_hold"] = l.all_bounds_hold;
  return j;
}

inline Json to_json(const OmegaCheck& o) {
  Json j;
  j["geometry"] = to_json(o.geometry);
  j["rows"] = o.rows;
  Json pts = Json::array();
  for (const auto& p : o.points) {
    Json e;
    e["M"] = p.M.str();
    e["open_path"] = p.open_path.to_json();
    e["o00"] = p.o00.to_json();
    e["graphical_checked"] = p.graphical_checked;
    e["graphical_failures"] = p.graphical_failures;
    pts.push_back(e);
  }
  j["points"] = pts;
  j["nondecreasing"] = o.nondecreasing;
  return j;
}

inline Json to_json(const GbtCoexistence& g) {
  Json j;
  j["alpha_hat1"] = g.alpha_hat1;
  j["alpha_hat2"] = g.alpha_hat2;
  j["wedge"] = {{"alpha_l", g.alpha_l.str()}, {"alpha_r", g.alpha_r.str()}, {"M", g.omega_m.str()}};
  j["x0"] = g.x0;
  j["t0"] = g.t0.str();
  j["warnings"] = detail::warnings_json(g.warnings);
  j["ones_at_threshold"] = g.ones.to_json();
  j["omega1"] = g.omega1.to_json();
  j["omega2"] = g.omega2.to_json();
  j["omega3"] = g.omega3.to_json();
  j["omega_all"] = g.omega_all.to_json();
  j["product"] = g.product;
  j["product_difference"] = g.product_difference;
  j["product_std_error"] = g.product_std_error;
  j["product_within_3sigma"] = g.product_within_3sigma;
  j["implication_failures"] = g.implication_failures;
  return j;
}

inline Json to_json(const LambdaCEstimate& l) {
  Json j;
  j["lambda_c_hat"] = l.lambda_c_hat;
  j["bracket"] = {l.low, l.high};
  Json ps = Json::array();
  for (const auto& p : l.probes) {
    Json e = p.survival.to_json();
    e["lambda"] = p.lambda;
    ps.push_back(e);
  }
  j["probes"] = ps;
  j["note"] = "finite-time survival proxy, not the critical value itself";
  return j;
}

// Runs the experiment named in cfg.experiment.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  ExperimentResult res;
  Json body;
  const std::string& id = cfg.experiment;
  if (id == "survival-curve") {
    const auto s = survival_curve(cfg);
    body = to_json(s);
    std::string csv = "M,successes,replicas,proportion,wilson_low,wilson_high\n";
    for (const auto& p : s.points)
      csv += p.M.str() + "," + std::to_string(p.survival.successes) + "," + std::to_string(p.survival.replicas) + "," +
             detail::fmt_double(p.survival.estimate) + "," + detail::fmt_double(p.survival.interval.low) + "," +
             detail::fmt_double(p.survival.interval.high) + "\n";
    res.csv.push_back({"survival_curve.csv", csv});
  } else if (id == "edge-growth") {
    body = to_json(edge_growth_check(cfg));
  } else if (id == "coupling-check") {
    const auto c = coupling_check(cfg);
    body = to_json(c);
    std::string csv = "t,survivors,disagreement,identity_violations,nu_growth\n";
    for (const auto& p : c.checkpoints)
      csv += detail::fmt_double(p.t) + "," + std::to_string(p.survivors) + "," + detail::fmt_double(p.disagreement) +
             "," + std::to_string(p.identity_violations) + "," + detail::fmt_double(p.nu_growth) + "\n";
    res.csv.push_back({"coupling.csv", csv});
  } else if (id == "edge-speed") {
    Json pts = Json::array();
    std::string csv = "lambda,alpha_hat,ci_low,ci_high,used,discarded\n";
    for (double l : cfg.lambdas) {
      const auto e = edge_speed(cfg, l);
      Json p = detail::edge_json(e);
      p["lambda"] = l;
      pts.push_back(p);
      csv += detail::fmt_double(l) + "," + detail::fmt_double(e.alpha_hat) + "," + detail::fmt_double(e.ci.low) + "," +
             detail::fmt_double(e.ci.high) + "," + std::to_string(e.used) + "," + std::to_string(e.discarded) + "\n";
    }
    body["points"] = pts;
    res.csv.push_back({"edge_speed.csv", csv});
  } else if (id == "lemma2") {
    const auto l = lemma2_check(cfg);
    body = to_json(l);
    std::string csv = "M,parallelograms,p_o00,p_e,bound\n";
    for (const auto& p : l.points)
      csv += p.M.str() + "," + std::to_string(p.parallelograms) + "," + detail::fmt_double(p.o_event.estimate) + "," +
             detail::fmt_double(p.e_event.estimate) + "," + detail::fmt_double(p.bound) + "\n";
    res.csv.push_back({"lemma2.csv", csv});
  } else if (id == "omega-infinity") {
    const auto o = omega_infinity_check(cfg);
    body = to_json(o);
    std::string csv = "M,p_open_path,p_o00\n";
    for (const auto& p : o.points)
      csv += p.M.str() + "," + detail::fmt_double(p.open_path.estimate) + "," + detail::fmt_double(p.o00.estimate) + "\n";
    res.csv.push_back({"omega_infinity.csv", csv});
  } else if (id == "gbt-coexistence") {
    body = to_json(gbt_coexistence(cfg));
  } else if (id == "lambda-c") {
    const auto l = estimate_lambda_c(cfg);
    body = to_json(l);
    std::string csv = "lambda,survival,wilson_low,wilson_high\n";
    for (const auto& p : l.probes)
      csv += detail::fmt_double(p.lambda) + "," + detail::fmt_double(p.survival.estimate) + "," +
             detail::fmt_double(p.survival.interval.low) + "," + detail::fmt_double(p.survival.interval.high) + "\n";
    res.csv.push_back({"lambda_c.csv", csv});
  } else {
    throw InvalidArgument("unknown experiment: " + id);
  }
  res.report["experiment"] = id;
  res.report["reproducibility"] = detail::reproducibility(cfg);
  res.report["replicas"] = cfg.replicas;
  res.report["result"] = body;
  res.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return res;
}

}  // namespace wedgecp
