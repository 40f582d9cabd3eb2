#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "wedgecp/regions.hpp"
#include "wedgecp/timeline.hpp"

namespace wedgecp {

// Per-site membership intervals of a region, placed on the double line and
// computed lazily for the sites a simulation actually visits.
class RegionSchedule {
 public:
  struct Slot {
    ExactTime lo;
    ExactTime hi;  // infinity() when unbounded
  };

  RegionSchedule(const Region& region, SiteWindow window)
      : region_(region), window_(window), cache_(window.size()) {}

  const std::vector<Slot>& slots(Site x) const {
    auto& entry = cache_[static_cast<std::size_t>(x - window_.first)];
    if (!entry) {
      std::vector<Slot> out;
      for (const auto& iv : site_intervals(region_, x)) {
        out.push_back({ExactTime::from_rational(iv.lo), iv.hi ? ExactTime::from_rational(*iv.hi) : ExactTime::infinity()});
      }
      entry = std::move(out);
    }
    return *entry;
  }

  // Slot containing the double time t, if any.
  const Slot* find(Site x, double t) const {
    for (const auto& s : slots(x))
      if (ge(t, s.lo) && le(t, s.hi)) return &s;
    return nullptr;
  }

  // Slot containing the exact time t, if any.
  const Slot* find(Site x, const ExactTime& t) const {
    for (const auto& s : slots(x))
      if (le(s.lo, t) && le(t, s.hi)) return &s;
    return nullptr;
  }

 private:
  const Region& region_;
  SiteWindow window_;
  mutable std::vector<std::optional<std::vector<Slot>>> cache_;
};

// Space-time points that paths may not traverse: per site, a sorted list of
// half-open time intervals [from, to). Used for GBT 1-paths, which may not
// pass a point occupied by a 2.
class BlockedIntervals {
 public:
  BlockedIntervals() = default;
  explicit BlockedIntervals(SiteWindow window) : window_(window), per_site_(window.size()) {}

  void add(Site x, double from, double to) {
    if (!window_.contains(x) || !(from < to)) return;
    per_site_[static_cast<std::size_t>(x - window_.first)].emplace_back(from, to);
  }

  // Must be called after the last add().
  void finalize() {
    for (auto& v : per_site_) std::sort(v.begin(), v.end());
  }

  bool blocked(Site x, double t) const {
    if (!window_.contains(x)) return false;
    for (const auto& [a, b] : per_site_[static_cast<std::size_t>(x - window_.first)]) {
      if (a > t) break;
      if (t < b) return true;
    }
    return false;
  }

  // Start of the first blocked interval beginning strictly after t.
  double next_block_after(Site x, double t) const {
    if (window_.contains(x)) {
      for (const auto& [a, b] : per_site_[static_cast<std::size_t>(x - window_.first)])
        if (a > t) return a;
    }
    return std::numeric_limits<double>::infinity();
  }

 private:
  SiteWindow window_;
  std::vector<std::vector<std::pair<double, double>>> per_site_;
};

}  // namespace wedgecp
