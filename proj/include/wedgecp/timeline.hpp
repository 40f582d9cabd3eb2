#pragma once

// Realized Harris graphical representation on a finite window of sites: death
// marks per site and birth arrows per directed nearest-neighbour edge, each
// arrow optionally carrying a "1-only" label.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "wedgecp/errors.hpp"
#include "wedgecp/rng.hpp"

namespace wedgecp {

using Site = std::int64_t;

struct SiteWindow {
  Site first = 0;
  Site last = -1;

  bool empty() const { return last < first; }
  std::size_t size() const { return empty() ? 0 : static_cast<std::size_t>(last - first + 1); }
  bool contains(Site x) const { return x >= first && x <= last; }
  friend bool operator==(const SiteWindow&, const SiteWindow&) = default;
};

struct SpaceTimePoint {
  Site x = 0;
  double t = 0.0;
};

enum class Direction : int { kLeft = -1, kRight = 1 };

inline Site target(Site from, Direction dir) { return from + static_cast<int>(dir); }

enum class EventKind : std::uint8_t { kDeath = 0, kArrow = 1 };

// One event in global order (used for serialization and brute-force checks).
struct TimelineEvent {
  EventKind kind = EventKind::kDeath;
  Site x = 0;
  Site y = 0;  // arrows only
  double t = 0.0;
  bool one_only = false;
};

// Deaths before arrows at equal times, arrows by ascending source site.
inline bool event_order(const TimelineEvent& a, const TimelineEvent& b) {
  if (a.t != b.t) return a.t < b.t;
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.x != b.x) return a.x < b.x;
  return a.y < b.y;
}

class EventTimeline {
 public:
  struct Params {
    SiteWindow window;
    double horizon = 0.0;
    double lambda = 0.0;
    double one_only_prob = 0.0;
    SeedKey seed;
  };

  EventTimeline() = default;

  // Independent Poisson processes: rate 1 per site, rate lambda per directed
  // edge inside the window, each arrow labelled 1-only with the given
  // probability. Deterministic in the seed.
  static EventTimeline build(SiteWindow window, double horizon, double lambda, double one_only_prob,
                             SeedKey seed);

  // Timeline from explicit events (hand-built cases, deserialization, masking).
  static EventTimeline from_events(const Params& params, std::vector<TimelineEvent> events);

  const Params& params() const { return params_; }
  SiteWindow window() const { return params_.window; }
  double horizon() const { return params_.horizon; }
  double lambda() const { return params_.lambda; }
  double one_only_prob() const { return params_.one_only_prob; }
  const SeedKey& seed() const { return params_.seed; }

  std::span<const double> deaths(Site x) const {
    const std::size_t i = index(x);
    return {death_times_.data() + death_offsets_[i], death_offsets_[i + 1] - death_offsets_[i]};
  }

  // Arrow times out of x in direction dir (empty when the target leaves the window).
  std::span<const double> arrows(Site x, Direction dir) const {
    const Edges& e = edges(dir);
    const std::size_t i = index(x);
    return {e.times.data() + e.offsets[i], e.offsets[i + 1] - e.offsets[i]};
  }

  std::span<const std::uint8_t> labels(Site x, Direction dir) const {
    const Edges& e = edges(dir);
    const std::size_t i = index(x);
    return {e.one_only.data() + e.offsets[i], e.offsets[i + 1] - e.offsets[i]};
  }

  std::size_t death_count() const { return death_times_.size(); }
  std::size_t arrow_count() const { return right_.times.size() + left_.times.size(); }

  // All events in the global processing order.
  std::vector<TimelineEvent> events() const;

  // Copy keeping only the events accepted by the predicate.
  EventTimeline filtered(const std::function<bool(const TimelineEvent&)>& keep) const;

  // JSON-lines: a header record followed by one record per event.
  void write_jsonl(std::ostream& out) const;
  static EventTimeline read_jsonl(std::istream& in);

 private:
  struct Edges {
    std::vector<std::size_t> offsets;
    std::vector<double> times;
    std::vector<std::uint8_t> one_only;
  };

  const Edges& edges(Direction dir) const { return dir == Direction::kRight ? right_ : left_; }

  std::size_t index(Site x) const {
    if (!params_.window.contains(x)) throw OutOfWindow("site " + std::to_string(x) + " outside timeline window");
    return static_cast<std::size_t>(x - params_.window.first);
  }

  static void validate(const Params& p);

  Params params_;
  std::vector<std::size_t> death_offsets_{0};
  std::vector<double> death_times_;
  Edges right_{{0}, {}, {}};
  Edges left_{{0}, {}, {}};
};

inline void EventTimeline::validate(const Params& p) {
  if (p.window.empty()) throw InvalidArgument("timeline window is empty");
  if (!(p.horizon > 0.0)) throw InvalidArgument("timeline horizon must be positive");
  if (!(p.lambda >= 0.0)) throw InvalidArgument("arrow rate must be non-negative");
  if (!(p.one_only_prob >= 0.0 && p.one_only_prob <= 1.0))
    throw InvalidArgument("one-only probability must lie in [0,1]");
}

inline EventTimeline EventTimeline::build(SiteWindow window, double horizon, double lambda,
                                          double one_only_prob, SeedKey seed) {
  EventTimeline tl;
  tl.params_ = Params{window, horizon, lambda, one_only_prob, seed};
  validate(tl.params_);

  const std::size_t n = window.size();
  tl.death_offsets_.reserve(n + 1);
  tl.death_times_.reserve(static_cast<std::size_t>(static_cast<double>(n) * horizon * 1.05) + 16);
  const std::size_t expected_arrows = static_cast<std::size_t>(static_cast<double>(n) * horizon * lambda * 1.05) + 16;
  for (Edges* e : {&tl.right_, &tl.left_}) {
    e->offsets.reserve(n + 1);
    e->times.reserve(expected_arrows);
    e->one_only.reserve(expected_arrows);
  }

  for (Site x = window.first; x <= window.last; ++x) {
    RandomStream deaths(seed, StreamKind::kDeath, x);
    for (double t = deaths.exponential(1.0); t <= horizon; t += deaths.exponential(1.0))
      tl.death_times_.push_back(t);
    tl.death_offsets_.push_back(tl.death_times_.size());

    for (Direction dir : {Direction::kRight, Direction::kLeft}) {
      Edges& e = dir == Direction::kRight ? tl.right_ : tl.left_;
      if (lambda > 0.0 && window.contains(target(x, dir))) {
        const bool right = dir == Direction::kRight;
        RandomStream times(seed, right ? StreamKind::kArrowRight : StreamKind::kArrowLeft, x);
        RandomStream labels(seed, right ? StreamKind::kLabelRight : StreamKind::kLabelLeft, x);
        for (double t = times.exponential(lambda); t <= horizon; t += times.exponential(lambda)) {
          e.times.push_back(t);
          e.one_only.push_back(one_only_prob > 0.0 && labels.bernoulli(one_only_prob) ? 1 : 0);
        }
      }
      e.offsets.push_back(e.times.size());
    }
  }
  return tl;
}

inline EventTimeline EventTimeline::from_events(const Params& params, std::vector<TimelineEvent> events) {
  EventTimeline tl;
  tl.params_ = params;
  validate(params);
  const SiteWindow w = params.window;
  for (const auto& ev : events) {
    if (!(ev.t > 0.0 && ev.t <= params.horizon))
      throw InvalidArgument("event time outside (0, horizon]");
    if (!w.contains(ev.x)) throw OutOfWindow("event site outside window");
    if (ev.kind == EventKind::kArrow) {
      if (!w.contains(ev.y) || (ev.y - ev.x != 1 && ev.y - ev.x != -1))
        throw InvalidArgument("arrow must join nearest neighbours inside the window");
    }
  }
  std::sort(events.begin(), events.end(), [](const TimelineEvent& a, const TimelineEvent& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.t < b.t;
  });

  const std::size_t n = w.size();
  std::vector<std::vector<double>> deaths(n), right(n), left(n);
  std::vector<std::vector<std::uint8_t>> right_l(n), left_l(n);
  for (const auto& ev : events) {
    const auto i = static_cast<std::size_t>(ev.x - w.first);
    if (ev.kind == EventKind::kDeath) {
      deaths[i].push_back(ev.t);
    } else if (ev.y > ev.x) {
      right[i].push_back(ev.t);
      right_l[i].push_back(ev.one_only ? 1 : 0);
    } else {
      left[i].push_back(ev.t);
      left_l[i].push_back(ev.one_only ? 1 : 0);
    }
  }
  auto strictly_increasing = [](const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (!strictly_increasing(deaths[i]) || !strictly_increasing(right[i]) || !strictly_increasing(left[i]))
      throw InvalidArgument("duplicate event times on one site or edge");
    tl.death_times_.insert(tl.death_times_.end(), deaths[i].begin(), deaths[i].end());
    tl.death_offsets_.push_back(tl.death_times_.size());
    tl.right_.times.insert(tl.right_.times.end(), right[i].begin(), right[i].end());
    tl.right_.one_only.insert(tl.right_.one_only.end(), right_l[i].begin(), right_l[i].end());
    tl.right_.offsets.push_back(tl.right_.times.size());
    tl.left_.times.insert(tl.left_.times.end(), left[i].begin(), left[i].end());
    tl.left_.one_only.insert(tl.left_.one_only.end(), left_l[i].begin(), left_l[i].end());
    tl.left_.offsets.push_back(tl.left_.times.size());
  }
  return tl;
}

inline std::vector<TimelineEvent> EventTimeline::events() const {
  std::vector<TimelineEvent> out;
  out.reserve(death_count() + arrow_count());
  const SiteWindow w = window();
  for (Site x = w.first; x <= w.last; ++x) {
    for (double t : deaths(x)) out.push_back({EventKind::kDeath, x, x, t, false});
    for (Direction dir : {Direction::kLeft, Direction::kRight}) {
      auto times = arrows(x, dir);
      auto labs = labels(x, dir);
      for (std::size_t i = 0; i < times.size(); ++i)
        out.push_back({EventKind::kArrow, x, target(x, dir), times[i], labs[i] != 0});
    }
  }
  std::sort(out.begin(), out.end(), event_order);
  return out;
}

inline EventTimeline EventTimeline::filtered(const std::function<bool(const TimelineEvent&)>& keep) const {
  std::vector<TimelineEvent> kept;
  for (const auto& ev : events())
    if (keep(ev)) kept.push_back(ev);
  return from_events(params_, std::move(kept));
}

inline void EventTimeline::write_jsonl(std::ostream& out) const {
  nlohmann::ordered_json header;
  header["kind"] = "header";
  header["window"] = {params_.window.first, params_.window.last};
  header["horizon"] = params_.horizon;
  header["lambda"] = params_.lambda;
  header["one_only_prob"] = params_.one_only_prob;
  header["seed"] = {{"master", params_.seed.master}, {"stream", params_.seed.stream}};
  out << header.dump() << '\n';
  for (const auto& ev : events()) {
    nlohmann::ordered_json rec;
    if (ev.kind == EventKind::kDeath) {
      rec["kind"] = "death";
      rec["x"] = ev.x;
      rec["t"] = ev.t;
    } else {
      rec["kind"] = "arrow";
      rec["x"] = ev.x;
      rec["y"] = ev.y;
      rec["t"] = ev.t;
      rec["one_only"] = ev.one_only;
    }
    out << rec.dump() << '\n';
  }
}

inline EventTimeline EventTimeline::read_jsonl(std::istream& in) {
  std::string line;
  std::optional<Params> params;
  std::vector<TimelineEvent> events;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto rec = nlohmann::json::parse(line);
    const std::string kind = rec.at("kind").get<std::string>();
    if (kind == "header") {
      Params p;
      p.window = {rec.at("window").at(0).get<Site>(), rec.at("window").at(1).get<Site>()};
      p.horizon = rec.at("horizon").get<double>();
      p.lambda = rec.at("lambda").get<double>();
      p.one_only_prob = rec.at("one_only_prob").get<double>();
      p.seed = {rec.at("seed").at("master").get<std::uint64_t>(), rec.at("seed").at("stream").get<std::uint64_t>()};
      params = p;
    } else if (kind == "death") {
      events.push_back({EventKind::kDeath, rec.at("x").get<Site>(), rec.at("x").get<Site>(), rec.at("t").get<double>(), false});
    } else if (kind == "arrow") {
      events.push_back({EventKind::kArrow, rec.at("x").get<Site>(), rec.at("y").get<Site>(), rec.at("t").get<double>(),
                        rec.value("one_only", false)});
    } else {
      throw InvalidArgument("unknown event kind '" + kind + "'");
    }
  }
  if (!params) throw InvalidArgument("event log has no header record");
  return from_events(*params, std::move(events));
}

}  // namespace wedgecp
