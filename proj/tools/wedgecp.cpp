// Command-line driver. Exit codes: 0 success, 1 invalid arguments, 2 runtime
// error, 3 acceptance-threshold failure under --check.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wedgecp/wedgecp.hpp"

namespace {

using namespace wedgecp;
using Json = nlohmann::ordered_json;

struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags shared by every subcommand; a value is set only when given.
struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicas;
  std::optional<double> horizon;
  std::optional<double> window_margin;
  std::optional<unsigned> threads;
  std::string out_dir;
  std::string config;
  bool check = false;
};

// Subcommand-specific overrides of ExperimentConfig fields.
struct Overrides {
  std::optional<double> lambda, lambda1, lambda2, alpha_hat, alpha_hat2, burn_in, lambda_lo, lambda_hi, tolerance,
      survival_threshold, growth_a, growth_b;
  std::optional<std::string> alpha_l, alpha_r, frac_l, frac_r, M, m_list, block_alpha, beta, block_m_list, omega_m;
  std::optional<std::string> lambdas;
  std::optional<std::int64_t> ell, d, rows, x0;
  std::optional<std::size_t> threshold;
  bool from_solution = false;
  bool no_common_point = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

// Geometry values are exact: "p/q" or an integer, never a decimal.
Rational exact(const std::string& s, const char* what) {
  if (s.find_first_of(".eE") != std::string::npos)
    throw InvalidArgument(std::string(what) + " must be an exact rational p/q, got '" + s + "'");
  return Rational::parse(s);
}

std::vector<Rational> exact_list(const std::string& s, const char* what) {
  std::vector<Rational> out;
  for (const auto& item : split(s, ',')) out.push_back(exact(item, what));
  if (out.empty()) throw InvalidArgument(std::string(what) + " is empty");
  return out;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "master seed (fallback: WEDGECP_SEED)");
  app->add_option("--replicas", c.replicas, "Monte Carlo replicas");
  app->add_option("--horizon", c.horizon, "time horizon");
  app->add_option("--window-margin", c.window_margin, "spatial margin of the simulated window");
  app->add_option("--threads", c.threads, "worker threads");
  app->add_option("--out-dir", c.out_dir, "output directory");
  app->add_option("--config", c.config, "JSON config (or a manifest.json); flags override it");
  app->add_flag("--check", c.check, "exit 3 when acceptance thresholds fail");
}

ExperimentConfig load_config(const Common& c, const std::string& experiment) {
  ExperimentConfig cfg;
  bool seed_from_file = false;
  if (!c.config.empty()) {
    nlohmann::json j = io::read_json(c.config);
    if (j.contains("config")) j = j["config"];
    seed_from_file = j.contains("seed");
    cfg = ExperimentConfig::from_json(j);
  }
  cfg.experiment = experiment;
  if (c.seed) {
    cfg.seed = *c.seed;
  } else if (!seed_from_file) {
    if (const char* env = std::getenv("WEDGECP_SEED")) {
      try {
        cfg.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw InvalidArgument(std::string("WEDGECP_SEED is not an integer: ") + env);
      }
    }
  }
  if (c.replicas) cfg.replicas = *c.replicas;
  if (c.horizon) cfg.horizon = *c.horizon;
  if (c.window_margin) cfg.window_margin = *c.window_margin;
  if (c.threads) cfg.threads = *c.threads;
  return cfg;
}

void apply(const Overrides& o, ExperimentConfig& cfg) {
  auto set = [](const auto& opt, auto& field) {
    if (opt) field = *opt;
  };
  set(o.lambda, cfg.lambda);
  set(o.lambda1, cfg.lambda1);
  set(o.lambda2, cfg.lambda2);
  if (o.alpha_hat) cfg.alpha_hat = *o.alpha_hat;
  if (o.alpha_hat2) cfg.alpha_hat2 = *o.alpha_hat2;
  if (o.growth_a) cfg.growth_a = *o.growth_a;
  if (o.growth_b) cfg.growth_b = *o.growth_b;
  set(o.burn_in, cfg.burn_in);
  set(o.lambda_lo, cfg.lambda_lo);
  set(o.lambda_hi, cfg.lambda_hi);
  set(o.tolerance, cfg.tolerance);
  set(o.survival_threshold, cfg.survival_threshold);
  if (o.alpha_l) cfg.alpha_l = exact(*o.alpha_l, "--alpha-l");
  if (o.alpha_r) cfg.alpha_r = exact(*o.alpha_r, "--alpha-r");
  if (o.frac_l) cfg.frac_l = exact(*o.frac_l, "--frac-l");
  if (o.frac_r) cfg.frac_r = exact(*o.frac_r, "--frac-r");
  if (o.M) cfg.M = exact(*o.M, "--M");
  if (o.m_list) cfg.m_list = exact_list(*o.m_list, "--m-list");
  if (o.block_alpha) cfg.block_alpha = exact(*o.block_alpha, "--alpha");
  if (o.beta) cfg.beta = exact(*o.beta, "--beta");
  if (o.block_m_list) cfg.block_m_list = exact_list(*o.block_m_list, "--m-list");
  if (o.omega_m) cfg.omega_m = exact(*o.omega_m, "--omega-m");
  if (o.lambdas) {
    cfg.lambdas.clear();
    for (const auto& s : split(*o.lambdas, ',')) cfg.lambdas.push_back(std::stod(s));
  }
  set(o.ell, cfg.ell);
  set(o.d, cfg.d);
  set(o.rows, cfg.rows);
  set(o.x0, cfg.x0);
  set(o.threshold, cfg.threshold);
  if (o.from_solution) cfg.from_solution = true;
  if (o.no_common_point) cfg.common_point = false;
}

// Acceptance thresholds applied under --check; returns the failed conditions.
std::vector<std::string> check_failures(const ExperimentConfig& cfg, const Json& r) {
  std::vector<std::string> f;
  const std::string& id = cfg.experiment;
  if (id == "survival-curve") {
    if (!r["nondecreasing"].get<bool>()) f.push_back("survival proportions are not nondecreasing in M");
    if (r["paired_monotonicity_violations"].get<std::size_t>() != 0) f.push_back("paired monotonicity violated");
    if (r["points"].back()["estimate"].get<double>() < 0.9) f.push_back("survival at the largest M is below 0.9");
  } else if (id == "coupling-check") {
    const auto& last = r["checkpoints"].back();
    if (last["disagreement"].get<double>() > 0.01) f.push_back("final disagreement fraction exceeds 1%");
    for (const auto& cp : r["checkpoints"])
      if (cp["nearest_neighbor_identity_violations"].get<std::size_t>() != 0)
        f.push_back("nearest-neighbour identity fails at t=" + std::to_string(cp["t"].get<double>()));
    const double ar = Rational::parse(r["speeds"]["alpha_r"].get<std::string>()).to_double();
    const auto& ci = r["right_edge_speed"]["ci95"];
    if (ci[0].get<double>() < 0.9 * ar || ci[1].get<double>() > 1.1 * ar)
      f.push_back("r_t/t confidence interval is not within 10% of alpha_r");
    if (r["insufficient_data"].get<bool>()) f.push_back("fewer than 30 surviving replicas");
  } else if (id == "edge-speed") {
    const auto& pts = r["points"];
    for (std::size_t i = 1; i < pts.size(); ++i)
      if (!(pts[i - 1]["ci95"][1].get<double>() < pts[i]["ci95"][0].get<double>()))
        f.push_back("edge-speed intervals overlap or decrease between lambda=" +
                    std::to_string(pts[i - 1]["lambda"].get<double>()) + " and " +
                    std::to_string(pts[i]["lambda"].get<double>()));
    if (!pts.empty() && !(pts.back()["ci95"][0].get<double>() > 0.0))
      f.push_back("largest-lambda edge-speed interval does not exclude 0");
  } else if (id == "lemma2") {
    if (!r["nondecreasing"].get<bool>()) f.push_back("P(O_00) is not nondecreasing in M");
    if (!r["all_bounds_hold"].get<bool>()) f.push_back("positive-correlation lower bound fails beyond 3 sigma");
  } else if (id == "omega-infinity") {
    for (const auto& p : r["points"])
      if (p["graphical_failures"].get<std::size_t>() != 0) f.push_back("open path without a graphical path");
  } else if (id == "gbt-coexistence") {
    if (!(r["ones_at_threshold"]["wilson95"][0].get<double>() > 0.0))
      f.push_back("Wilson interval for the 1-count event includes 0");
    if (!r["product_within_3sigma"].get<bool>()) f.push_back("Omega product check fails beyond 3 sigma");
  }
  return f;
}

Json manifest(const ExperimentConfig& cfg, const Json& parameters, double runtime) {
  Json m;
  m["tool"] = "wedgecp";
  m["version"] = io::kVersion;
  m["experiment"] = cfg.experiment;
  m["seed"] = cfg.seed;
  m["config_hash"] = cfg.hash();
  m["config"] = cfg.to_json();
  if (!parameters.is_null()) m["parameters"] = parameters;
  m["timestamp"] = io::timestamp(runtime);
  return m;
}

// Writes the standard layout; prints the report to stdout.
void emit(const Common& c, const ExperimentConfig& cfg, Json report, double runtime,
          const std::vector<std::pair<std::string, std::string>>& csv = {}, const Json& parameters = nullptr,
          const EventTimeline* events = nullptr) {
  report["timestamp"] = io::timestamp(runtime);
  if (!c.out_dir.empty()) {
    const auto dir = io::prepare_dir(c.out_dir);
    io::write_json(dir / "manifest.json", manifest(cfg, parameters, runtime));
    io::write_json(dir / "report.json", report);
    for (const auto& [name, text] : csv) io::write_text(dir / name, text);
    if (events) {
      std::ofstream out(dir / "events.jsonl", std::ios::binary);
      events->write_jsonl(out);
    }
  }
  std::cout << io::without_timestamp(report).dump(2) << "\n";
}

void enforce(const Common& c, const std::vector<std::string>& failures) {
  if (!c.check) return;
  for (const auto& f : failures) std::cerr << "check failed: " << f << "\n";
  if (!failures.empty()) throw CheckFailed("acceptance thresholds not met");
}

// ---------------------------------------------------------------------------
// Initial states and regions given on the command line.

Configuration parse_initial(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.empty()) throw InvalidArgument("empty --initial");
  const std::string& kind = parts[0];
  auto need = [&](std::size_t n) {
    if (parts.size() != n) throw InvalidArgument("malformed --initial '" + s + "'");
  };
  if (kind == "single") {
    need(2);
    return Configuration::single(std::stoll(parts[1]));
  }
  if (kind == "interval") {
    need(3);
    return Configuration::interval(std::stoll(parts[1]), std::stoll(parts[2]));
  }
  if (kind == "sites") {
    need(2);
    std::vector<Site> v;
    for (const auto& x : split(parts[1], ',')) v.push_back(std::stoll(x));
    return Configuration::from_sites(v);
  }
  if (kind == "left") {
    need(2);
    return Configuration::left_half_line(std::stoll(parts[1]));
  }
  if (kind == "right") {
    need(2);
    return Configuration::right_half_line(std::stoll(parts[1]));
  }
  if (kind == "all") {
    need(1);
    return Configuration::all();
  }
  throw InvalidArgument("unknown --initial kind '" + kind + "' (single, interval, sites, left, right, all)");
}

Region parse_region(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.empty()) throw InvalidArgument("empty --region");
  const std::string& kind = parts[0];
  if (kind == "full" && parts.size() == 1) return FullSpace{};
  if (kind == "wedge" && parts.size() == 4)
    return Wedge(exact(parts[1], "alpha_l"), exact(parts[2], "alpha_r"), exact(parts[3], "M"));
  if (kind == "halfspace" && parts.size() == 3) return HalfSpace(exact(parts[1], "alpha_r"), exact(parts[2], "M"));
  if (kind == "parallelogram" && parts.size() == 7)
    return make_parallelogram(parse_kind(parts[1]), std::stoll(parts[2]), std::stoll(parts[3]),
                              exact(parts[4], "M"), exact(parts[5], "alpha"), exact(parts[6], "beta"));
  throw InvalidArgument("malformed --region '" + s +
                        "' (full | wedge:al:ar:M | halfspace:ar:M | parallelogram:KIND:j:k:M:alpha:beta)");
}

SiteWindow parse_window(const std::optional<std::string>& window, const std::optional<Site>& sites) {
  if (window) {
    const auto parts = split(*window, ':');
    if (parts.size() != 2) throw InvalidArgument("--window expects a:b");
    return {std::stoll(parts[0]), std::stoll(parts[1])};
  }
  if (sites) {
    if (*sites < 1) throw InvalidArgument("--sites must be positive");
    return {0, *sites - 1};
  }
  throw InvalidArgument("give --sites or --window");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  double lambda = 1.0;
  std::optional<Site> sites;
  std::optional<std::string> window;
  std::string initial = "single:0";
  std::string region = "full";
  std::optional<std::string> region_json;
};

void run_simulate(const Common& c, const SimulateArgs& a) {
  ExperimentConfig cfg = load_config(c, "simulate");
  cfg.lambda = a.lambda;
  if (!c.horizon) throw InvalidArgument("simulate needs --horizon");
  const auto started = std::chrono::steady_clock::now();
  const SiteWindow window = parse_window(a.window, a.sites);
  const Region region = a.region_json ? region_from_json(io::read_json(*a.region_json)) : parse_region(a.region);
  const Configuration initial = parse_initial(a.initial);
  const EventTimeline tl = EventTimeline::build(window, cfg.horizon, cfg.lambda, 0.0, cfg.key());
  const Trajectory traj = evolve(tl, region, initial);

  Json r;
  r["experiment"] = "simulate";
  r["reproducibility"] = {{"master_seed", cfg.seed}, {"config_hash", cfg.hash()}};
  r["window"] = {window.first, window.last};
  r["horizon"] = cfg.horizon;
  r["lambda"] = cfg.lambda;
  r["region"] = region_to_json(region);
  r["initial"] = a.initial;
  r["deaths"] = tl.death_count();
  r["arrows"] = tl.arrow_count();
  r["changes"] = traj.changes.size();
  r["births"] = std::count_if(traj.changes.begin(), traj.changes.end(), [](const StateChange& s) { return s.state; });
  r["final_sites"] = traj.final_sites;
  r["survived"] = traj.survived();
  r["edge_touched"] = traj.edge_touched();

  std::string changes = "t,x,state\n";
  for (const auto& ch : traj.changes) changes += fmt(ch.t) + "," + std::to_string(ch.x) + "," + std::to_string(ch.state) + "\n";
  std::string edges = "t,defined,l,r\n";
  for (const auto& e : extract_edges(traj).samples)
    edges += fmt(e.t) + "," + (e.defined ? "1" : "0") + "," + std::to_string(e.l) + "," + std::to_string(e.r) + "\n";
  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  const Json params = {{"window", {window.first, window.last}}, {"initial", a.initial}, {"region", region_to_json(region)}};
  emit(c, cfg, r, runtime, {{"trajectory.csv", changes}, {"edges.csv", edges}}, params, &tl);
}

// ---------------------------------------------------------------------------
// gbt

struct GbtArgs {
  double lambda1 = 4.0;
  double lambda2 = 2.0;
  std::optional<Site> sites;
  std::optional<std::string> window;
  std::string initial = "trees-left";
  bool direct = false;
};

GbtConfiguration parse_gbt_initial(const std::string& s) {
  if (s == "trees-left") return GbtConfiguration::trees_left_bush_at(0);
  const auto parts = split(s, ':');
  if (parts.size() == 2 && parts[0] == "states") {
    GbtConfiguration c;
    for (const auto& item : split(parts[1], ',')) {
      const auto kv = split(item, '=');
      if (kv.size() != 2) throw InvalidArgument("GBT states are given as x=s,x=s");
      c.set(std::stoll(kv[0]), static_cast<std::uint8_t>(std::stoi(kv[1])));
    }
    return c;
  }
  throw InvalidArgument("unknown GBT --initial '" + s + "' (trees-left | states:x=s,...)");
}

void run_gbt(const Common& c, const GbtArgs& a) {
  ExperimentConfig cfg = load_config(c, "gbt");
  cfg.lambda1 = a.lambda1;
  cfg.lambda2 = a.lambda2;
  if (!c.horizon) throw InvalidArgument("gbt needs --horizon");
  const auto started = std::chrono::steady_clock::now();
  const SiteWindow window = parse_window(a.window, a.sites);
  const GbtConfiguration initial = parse_gbt_initial(a.initial);
  std::optional<EventTimeline> tl;
  GbtTrajectory traj;
  if (a.direct) {
    traj = evolve_gbt_direct(cfg.lambda1, cfg.lambda2, initial, cfg.horizon, cfg.key(), window);
  } else {
    if (!(cfg.lambda1 > cfg.lambda2 && cfg.lambda2 > 0.0)) throw InvalidArgument("GBT requires lambda1 > lambda2 > 0");
    tl = EventTimeline::build(window, cfg.horizon, cfg.lambda1, (cfg.lambda1 - cfg.lambda2) / cfg.lambda1, cfg.key());
    traj = evolve_gbt(*tl, cfg.lambda1, cfg.lambda2, initial);
  }
  Json r;
  r["experiment"] = "gbt";
  r["reproducibility"] = {{"master_seed", cfg.seed}, {"config_hash", cfg.hash()}};
  r["method"] = a.direct ? "direct" : "graphical";
  r["window"] = {window.first, window.last};
  r["horizon"] = cfg.horizon;
  r["lambda1"] = cfg.lambda1;
  r["lambda2"] = cfg.lambda2;
  r["initial"] = a.initial;
  r["changes"] = traj.changes.size();
  r["ones"] = traj.final_count(1);
  r["twos"] = traj.final_count(2);
  r["sites_in_state_1"] = traj.sites_in_state(1);
  r["edge_touched"] = traj.edge_touched();
  std::string counts = "t,ones,twos\n";
  for (const auto& n : traj.counts) counts += fmt(n.t) + "," + std::to_string(n.ones) + "," + std::to_string(n.twos) + "\n";
  std::string changes = "t,x,state\n";
  for (const auto& ch : traj.changes) changes += fmt(ch.t) + "," + std::to_string(ch.x) + "," + std::to_string(ch.state) + "\n";
  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  const Json params = {{"window", {window.first, window.last}}, {"initial", a.initial}, {"direct", a.direct}};
  emit(c, cfg, r, runtime, {{"counts.csv", counts}, {"trajectory.csv", changes}}, params, tl ? &*tl : nullptr);
}

// ---------------------------------------------------------------------------
// geometry

struct GeometryArgs {
  std::string alpha = "2";
  std::string alpha_l, alpha_r;
  std::string M = "1";
  std::string beta = "1/2";
  std::optional<std::string> beta_override;
  std::int64_t ell = 2;
  std::int64_t d = 0;
  std::int64_t j = 0;
  std::int64_t k = 0;
  std::int64_t K = 50;
  std::int64_t max_m = 1'000'000;
  std::optional<std::string> svg;
  std::optional<std::string> csv;
};

Json point_json(const RationalPoint& p) { return {{"x", p.x.str()}, {"t", p.t.str()}}; }

Json solution_json(const IntegerSolution& s) {
  return {{"m", s.m},
          {"c", s.c},
          {"beta", s.beta.str()},
          {"ell", s.ell_prime},
          {"d", s.d_prime},
          {"alpha", s.alpha.str()},
          {"s_l", s.s_l.str()},
          {"s_r", s.s_r.str()},
          {"s_l_prime", s.s_l_prime.str()}};
}

std::string corners_csv(const YRegion& y) {
  std::string out = "label,stage,corner,x,t,x_approx,t_approx\n";
  static const char* names[] = {"bottom-left", "bottom-right", "top-right", "top-left"};
  for (const auto& part : y.parts)
    for (std::size_t i = 0; i < 4; ++i) {
      const auto& p = part.shape.corners[i];
      out += part.shape.label() + "," + std::to_string(part.stage) + "," + names[i] + "," + p.x.str() + "," +
             p.t.str() + "," + fmt(p.x.to_double()) + "," + fmt(p.t.to_double()) + "\n";
    }
  return out;
}

std::string svg_of(const YRegion& y, const std::optional<BoundingWedge>& wedge) {
  double x0 = 1e300, x1 = -1e300, t1 = 0;
  for (const auto& part : y.parts)
    for (const auto& p : part.shape.corners) {
      x0 = std::min(x0, p.x.to_double());
      x1 = std::max(x1, p.x.to_double());
      t1 = std::max(t1, p.t.to_double());
    }
  const double pad = 0.05 * std::max(x1 - x0, t1);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << x0 - pad << " " << -t1 - pad << " "
     << x1 - x0 + 2 * pad << " " << t1 + 2 * pad << "\">\n";
  const double stroke = 0.003 * std::max(x1 - x0, t1);
  static const char* colours[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"};
  for (const auto& part : y.parts) {
    os << "  <polygon fill=\"" << colours[part.stage % 6] << "\" fill-opacity=\"0.35\" stroke=\"black\" stroke-width=\""
       << stroke << "\" points=\"";
    for (const auto& p : part.shape.corners) os << p.x.to_double() << "," << -p.t.to_double() << " ";
    os << "\"><title>" << part.shape.label() << " stage " << part.stage << "</title></polygon>\n";
  }
  if (wedge) {
    const auto& w = wedge->wedge;
    const double left = w.dx.to_double() + w.alpha_l.to_double() * t1;
    const double right = w.dx.to_double() + w.M.to_double() + w.alpha_r.to_double() * t1;
    os << "  <polyline fill=\"none\" stroke=\"red\" stroke-width=\"" << stroke << "\" points=\"" << left << ","
       << -t1 << " " << w.dx.to_double() << ",0 " << w.dx.to_double() + w.M.to_double() << ",0 " << right << ","
       << -t1 << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void run_integer_solution(const Common& c, const GeometryArgs& a) {
  const IntegerSolution s = solve_integer_wedge(exact(a.alpha, "--alpha"), exact(a.alpha_l, "--alpha-l"),
                                                exact(a.alpha_r, "--alpha-r"), a.max_m);
  const Json full = solution_json(s);
  Json brief;
  for (const char* key : {"m", "c", "beta", "ell", "d"}) brief[key] = full[key];
  if (!c.out_dir.empty()) {
    const auto dir = io::prepare_dir(c.out_dir);
    Json r = full;
    r["timestamp"] = io::timestamp(0.0);
    io::write_json(dir / "report.json", r);
  }
  std::cout << brief.dump() << "\n";
}

void run_y_region(const Common& c, const GeometryArgs& a) {
  const YRegion y00 = assemble_y_region(a.ell, a.d, exact(a.M, "--M"), exact(a.alpha, "--alpha"),
                                        exact(a.beta, "--beta"));
  const YRegion y = y00.translate(a.j, a.k);
  Json r;
  r["ell"] = y.ell;
  r["d"] = y.d;
  r["M"] = y.M.str();
  r["alpha"] = y.alpha.str();
  r["beta"] = y.beta.str();
  r["translate"] = {a.j, a.k};
  r["size"] = y.size();
  Json parts = Json::array();
  for (const auto& part : y.parts) {
    Json p;
    p["label"] = part.shape.label();
    p["stage"] = part.stage;
    p["corners"] = Json::array();
    for (const auto& q : part.shape.corners) p["corners"].push_back(point_json(q));
    parts.push_back(p);
  }
  r["parallelograms"] = parts;
  if (y.bounds) {
    r["bounding_wedge"] = {{"alpha_l", y.bounds->wedge.alpha_l.str()},
                           {"alpha_r", y.bounds->wedge.alpha_r.str()},
                           {"M", y.bounds->wedge.M.str()},
                           {"dx", y.bounds->wedge.dx.str()}};
  }
  if (a.svg) io::write_text(*a.svg, svg_of(y, y.bounds));
  if (a.csv) io::write_text(*a.csv, corners_csv(y));
  if (!c.out_dir.empty()) {
    const auto dir = io::prepare_dir(c.out_dir);
    io::write_json(dir / "report.json", r);
    io::write_text(dir / "corners.csv", corners_csv(y));
    io::write_text(dir / "y_region.svg", svg_of(y, y.bounds));
  }
  std::cout << r.dump(2) << "\n";
}

void run_bounding_wedge(const GeometryArgs& a) {
  const BoundingWedge b = bounding_wedge(a.ell, a.d, exact(a.M, "--M"), exact(a.alpha, "--alpha"),
                                         exact(a.beta, "--beta"));
  Json r;
  r["s_l"] = b.slopes.s_l.str();
  r["s_r"] = b.slopes.s_r.str();
  r["x_l"] = b.x_l.str();
  r["x_r"] = b.x_r.str();
  r["width"] = b.width.str();
  r["wedge"] = {{"alpha_l", b.wedge.alpha_l.str()},
                {"alpha_r", b.wedge.alpha_r.str()},
                {"M", b.wedge.M.str()},
                {"dx", b.wedge.dx.str()}};
  std::cout << r.dump(2) << "\n";
}

void run_containment(const Common& c, const GeometryArgs& a) {
  const Rational al = exact(a.alpha_l, "--alpha-l"), ar = exact(a.alpha_r, "--alpha-r");
  IntegerSolution s = solve_integer_wedge(exact(a.alpha, "--alpha"), al, ar, a.max_m);
  if (a.beta_override) s.beta = exact(*a.beta_override, "--beta-override");
  const ContainmentReport rep = verify_containment(s, al, ar, exact(a.M, "--M"), a.K);
  Json r;
  r["solution"] = solution_json(s);
  r["passed"] = rep.passed;
  r["rows"] = rep.rows;
  r["corners_checked"] = rep.corners_checked;
  r["left_slope_ok"] = rep.left_slope_ok;
  r["right_slope_ok"] = rep.right_slope_ok;
  r["message"] = rep.message;
  if (rep.violation) {
    r["violation"] = {{"description", rep.violation->describe()},
                      {"translate", {rep.violation->translate.j, rep.violation->translate.k}},
                      {"parallelogram", rep.violation->parallelogram},
                      {"corner", rep.violation->corner},
                      {"point", point_json(rep.violation->point)},
                      {"beyond_rows", rep.violation_beyond_rows}};
  }
  if (!c.out_dir.empty()) io::write_json(io::prepare_dir(c.out_dir) / "report.json", r);
  std::cout << r.dump(2) << "\n";
  enforce(c, rep.passed ? std::vector<std::string>{} : std::vector<std::string>{"containment failed: " + rep.message});
}

// ---------------------------------------------------------------------------
// percolation field for one replica

struct FieldArgs {
  std::size_t replica = 0;
};

void run_field(const Common& c, const Overrides& o, const FieldArgs& a) {
  ExperimentConfig cfg = load_config(c, "percolation-field");
  apply(o, cfg);
  const auto started = std::chrono::steady_clock::now();
  const BlockGeometry g = block_geometry(cfg);
  const Rational M = cfg.block_m_list.front();
  const YRegion y00 = assemble_y_region(g.ell, g.d, M, g.alpha, g.beta);
  const FieldExtent ext = field_extent(y00, cfg.rows);
  const EventTimeline tl =
      EventTimeline::build({ext.sites.first - 1, ext.sites.last + 1}, std::max(1.0, static_cast<double>(ext.top_time.ceil())),
                           cfg.lambda, 0.0, cfg.key().child(a.replica));
  const PercolationField field = percolation_field(tl, y00, cfg.rows);
  const auto path = find_open_path(field);
  Json r;
  r["experiment"] = "percolation-field";
  r["reproducibility"] = {{"master_seed", cfg.seed}, {"config_hash", cfg.hash()}};
  r["geometry"] = to_json(g);
  r["M"] = M.str();
  r["rows"] = cfg.rows;
  r["replica"] = a.replica;
  std::string csv = "j,k,U";
  for (std::size_t i = 0; i < y00.size(); ++i) csv += "," + y00.parts[i].shape.label();
  csv += "\n";
  Json grid = Json::array();
  for (const auto& p : field.lattice().points()) {
    grid.push_back({{"j", p.j}, {"k", p.k}, {"U", field.open(p) ? 1 : 0}});
    csv += std::to_string(p.j) + "," + std::to_string(p.k) + "," + (field.open(p) ? "1" : "0");
    for (bool b : field.crossings(p)) csv += b ? ",1" : ",0";
    csv += "\n";
  }
  r["field"] = grid;
  r["open_path"] = path ? Json(Json::array()) : Json(nullptr);
  if (path) {
    for (const auto& p : *path) r["open_path"].push_back({p.j, p.k});
    r["graphical_path"] = path->size() > 1 ? Json(graphical_path_along(tl, y00, *path)) : Json(nullptr);
  }
  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  emit(c, cfg, r, runtime, {{"field.csv", csv}}, {{"replica", a.replica}});
}

// ---------------------------------------------------------------------------
// Monte Carlo experiments

void run_named(const Common& c, const Overrides& o, const std::string& experiment) {
  ExperimentConfig cfg = load_config(c, experiment);
  apply(o, cfg);
  if (experiment == "edge-speed") {
    if (c.replicas) cfg.edge_replicas = *c.replicas;
    if (c.horizon) cfg.edge_horizon = *c.horizon;
  }
  const ExperimentResult res = run_experiment(cfg);
  emit(c, cfg, res.report, res.runtime_seconds, res.csv);
  enforce(c, check_failures(cfg, res.report["result"]));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contact processes in wedges: simulation, block geometry and experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::kVersion);

  Common common;
  Overrides ov;

  auto rate = [&](CLI::App* sub) { sub->add_option("--lambda", ov.lambda, "infection rate"); };
  auto wedge_speeds = [&](CLI::App* sub) {
    sub->add_option("--alpha-l", ov.alpha_l, "left wedge speed p/q");
    sub->add_option("--alpha-r", ov.alpha_r, "right wedge speed p/q");
    sub->add_option("--frac-l", ov.frac_l, "alpha_l as a fraction of the edge speed");
    sub->add_option("--frac-r", ov.frac_r, "alpha_r as a fraction of the edge speed");
    sub->add_option("--alpha-hat", ov.alpha_hat, "edge speed (estimated when absent)");
  };
  auto blocks = [&](CLI::App* sub) {
    rate(sub);
    sub->add_option("--ell", ov.ell, "Y-region parameter ell");
    sub->add_option("--d", ov.d, "Y-region parameter d");
    sub->add_option("--alpha", ov.block_alpha, "parallelogram slope alpha p/q");
    sub->add_option("--beta", ov.beta, "parallelogram parameter beta p/q");
    sub->add_option("--m-list", ov.block_m_list, "comma-separated M values");
    sub->add_option("--rows", ov.rows, "lattice rows K");
    sub->add_option("--alpha-l", ov.alpha_l, "left wedge speed for --from-solution");
    sub->add_option("--alpha-r", ov.alpha_r, "right wedge speed for --from-solution");
    sub->add_flag("--from-solution", ov.from_solution, "derive (ell, d, beta) from the integer solution");
  };

  // simulate
  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "evolve one contact process on a fresh timeline");
  add_common(simulate, common);
  simulate->add_option("--lambda", sim.lambda, "infection rate");
  simulate->add_option("--sites", sim.sites, "window [0, sites-1]");
  simulate->add_option("--window", sim.window, "window a:b");
  simulate->add_option("--initial", sim.initial, "single:x | interval:a:b | sites:x,y | left:x | right:x | all");
  simulate->add_option("--region", sim.region, "full | wedge:al:ar:M | halfspace:ar:M | parallelogram:KIND:j:k:M:alpha:beta");
  simulate->add_option("--region-json", sim.region_json, "region as JSON");

  // gbt
  GbtArgs gbt;
  auto* gbt_cmd = app.add_subcommand("gbt", "evolve one grass-bushes-trees process");
  add_common(gbt_cmd, common);
  gbt_cmd->add_option("--lambda1", gbt.lambda1, "bush rate");
  gbt_cmd->add_option("--lambda2", gbt.lambda2, "tree rate");
  gbt_cmd->add_option("--sites", gbt.sites, "window [0, sites-1]");
  gbt_cmd->add_option("--window", gbt.window, "window a:b");
  gbt_cmd->add_option("--initial", gbt.initial, "trees-left | states:x=s,...");
  gbt_cmd->add_flag("--direct", gbt.direct, "simulate the rates directly instead of the graphical construction");

  // geometry
  GeometryArgs geo;
  auto* geometry = app.add_subcommand("geometry", "exact block geometry");
  geometry->require_subcommand(1);
  auto* integer = geometry->add_subcommand("integer-solution", "integer (m, c) solution for a wedge");
  auto* yreg = geometry->add_subcommand("y-region", "parallelograms of a Y region");
  auto* bwedge = geometry->add_subcommand("bounding-wedge", "bounding wedge of a Y region");
  auto* contain = geometry->add_subcommand("containment", "verify the translated Y regions lie in the target wedge");
  for (auto* sub : {integer, yreg, bwedge, contain}) {
    add_common(sub, common);
    sub->add_option("--alpha", geo.alpha, "parallelogram slope p/q");
  }
  for (auto* sub : {integer, contain}) {
    sub->add_option("--alpha-l", geo.alpha_l, "left wedge speed p/q")->required();
    sub->add_option("--alpha-r", geo.alpha_r, "right wedge speed p/q")->required();
    sub->add_option("--max-m", geo.max_m, "search bound for m");
  }
  for (auto* sub : {yreg, bwedge}) {
    sub->add_option("--ell", geo.ell, "ell");
    sub->add_option("--d", geo.d, "d");
    sub->add_option("--beta", geo.beta, "beta p/q");
  }
  for (auto* sub : {yreg, bwedge, contain}) sub->add_option("--M", geo.M, "scale M p/q");
  yreg->add_option("--j", geo.j, "translate j");
  yreg->add_option("--k", geo.k, "translate k");
  yreg->add_option("--svg", geo.svg, "write an SVG of the parallelograms");
  yreg->add_option("--csv", geo.csv, "write the corners as CSV");
  contain->add_option("--K", geo.K, "rows to check");
  contain->add_option("--beta-override", geo.beta_override, "replace beta (negative controls)");

  // percolation
  std::string mode = "lemma2";
  FieldArgs field;
  auto* perc = app.add_subcommand("percolation", "block events and open paths");
  add_common(perc, common);
  blocks(perc);
  perc->add_option("--mode", mode, "field | lemma2 | omega")->check(CLI::IsMember({"field", "lemma2", "omega"}));
  perc->add_option("--replica", field.replica, "replica index for --mode field");
  perc->add_flag("--no-common-point", ov.no_common_point, "skip the common bottom-point diagnostic");

  // Monte Carlo
  auto* survival = app.add_subcommand("survival-curve", "survival in wedges against M");
  add_common(survival, common);
  rate(survival);
  wedge_speeds(survival);
  survival->add_option("--m-list", ov.m_list, "comma-separated M values");

  auto* edge = app.add_subcommand("edge-speed", "right-edge speed from a half-line");
  add_common(edge, common);
  edge->add_option("--lambdas", ov.lambdas, "comma-separated infection rates");

  auto* coupling = app.add_subcommand("coupling-check", "wedge process against the upper invariant measure");
  add_common(coupling, common);
  rate(coupling);
  wedge_speeds(coupling);
  coupling->add_option("--M", ov.M, "wedge width p/q");
  coupling->add_option("--burn-in", ov.burn_in, "burn-in time for the invariant measure");
  coupling->add_option("--growth-a", ov.growth_a, "lower speed of the growth window");
  coupling->add_option("--growth-b", ov.growth_b, "upper speed of the growth window");

  auto* coexist = app.add_subcommand("gbt-coexistence", "bushes survive among trees");
  add_common(coexist, common);
  coexist->add_option("--lambda1", ov.lambda1, "bush rate");
  coexist->add_option("--lambda2", ov.lambda2, "tree rate");
  coexist->add_option("--alpha-hat1", ov.alpha_hat, "edge speed at lambda1");
  coexist->add_option("--alpha-hat2", ov.alpha_hat2, "edge speed at lambda2");
  coexist->add_option("--alpha-l", ov.alpha_l, "left wedge speed p/q");
  coexist->add_option("--alpha-r", ov.alpha_r, "right wedge speed p/q");
  coexist->add_option("--threshold", ov.threshold, "count threshold");
  coexist->add_option("--omega-m", ov.omega_m, "wedge width p/q");
  coexist->add_option("--x0", ov.x0, "start of the seeded interval");

  auto* lambda_c = app.add_subcommand("lambda-c", "finite-time proxy for the critical rate");
  add_common(lambda_c, common);
  lambda_c->add_option("--lo", ov.lambda_lo, "lower bracket");
  lambda_c->add_option("--hi", ov.lambda_hi, "upper bracket");
  lambda_c->add_option("--tolerance", ov.tolerance, "bracket width");
  lambda_c->add_option("--survival-threshold", ov.survival_threshold, "survival level defining the proxy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*simulate) run_simulate(common, sim);
    else if (*gbt_cmd) run_gbt(common, gbt);
    else if (*integer) run_integer_solution(common, geo);
    else if (*yreg) run_y_region(common, geo);
    else if (*bwedge) run_bounding_wedge(geo);
    else if (*contain) run_containment(common, geo);
    else if (*perc && mode == "field") run_field(common, ov, field);
    else if (*perc) run_named(common, ov, mode == "lemma2" ? "lemma2" : "omega-infinity");
    else if (*survival) run_named(common, ov, "survival-curve");
    else if (*edge) run_named(common, ov, "edge-speed");
    else if (*coupling) run_named(common, ov, "coupling-check");
    else if (*coexist) run_named(common, ov, "gbt-coexistence");
    else if (*lambda_c) run_named(common, ov, "lambda-c");
  } catch (const CheckFailed& e) {
    std::cerr << "wedgecp: " << e.what() << "\n";
    return 3;
  } catch (const InvalidArgument& e) {
    std::cerr << "wedgecp: invalid argument: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "wedgecp: invalid argument: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "wedgecp: error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
