#pragma once

// Counter-keyed random streams. Every Poisson process of a timeline (one per
// site, one per directed edge) and every replica gets its own engine seeded
// from a hash of (master, stream, component, index), so realizations do not
// depend on generation order or thread scheduling.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace wedgecp {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a, used to turn experiment tags into stream ids and configs into hashes.
inline constexpr std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct SeedKey {
  std::uint64_t master = 0;
  std::uint64_t stream = 0;

  // Key for a sub-stream, e.g. replica r of an experiment.
  SeedKey child(std::uint64_t index) const {
    return {master, splitmix64(stream ^ splitmix64(index + 0x632be59bd9b4e019ULL))};
  }
  SeedKey child(std::string_view tag) const { return child(fnv1a(tag)); }

  friend bool operator==(const SeedKey&, const SeedKey&) = default;
};

enum class StreamKind : std::uint64_t {
  kDeath = 1,
  kArrowRight = 2,
  kArrowLeft = 3,
  kLabelRight = 4,
  kLabelLeft = 5,
  kGeneric = 6,
};

inline std::uint64_t derive_seed(const SeedKey& key, StreamKind kind, std::int64_t index) {
  std::uint64_t h = splitmix64(key.master);
  h = splitmix64(h ^ key.stream);
  h = splitmix64(h ^ static_cast<std::uint64_t>(kind));
  h = splitmix64(h ^ static_cast<std::uint64_t>(index));
  return h;
}

// mt19937_64 output is fixed by the standard; the transforms below avoid the
// implementation-defined std:: distributions so streams are portable.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(const SeedKey& key, StreamKind kind, std::int64_t index)
      : engine_(derive_seed(key, kind, index)) {}

  // Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wedgecp
