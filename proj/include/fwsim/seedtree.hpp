#pragma once

// Two-level seed hierarchy and sampling primitives.
//
// Every stochastic quantity of a run is a pure function of the master seed
// and the run index: the master seed yields one trajectory seed per run, and
// each trajectory seed yields the seventeen module seeds below, always drawn
// in the declared order.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "fwsim/error.hpp"

namespace fwsim {

struct MasterSeed {
  std::uint64_t value = 1;
};

enum class SeedId : std::size_t {
  ACC, GYR, MAG, OSP, OAT, GNSS, TAS, AOA, AOS, PLAT, CAM,
  WIND, WEATHER, TURB, MISSION, GEO, ALIGN
};

inline constexpr std::size_t kModuleSeedCount = 17;

inline constexpr std::array<std::string_view, kModuleSeedCount> kSeedNames = {
    "ACC",  "GYR",  "MAG",     "OSP",  "OAT",     "GNSS", "TAS",  "AOA",  "AOS",
    "PLAT", "CAM",  "WIND",    "WEATHER", "TURB", "MISSION", "GEO", "ALIGN"};

struct TrajectorySeedSet {
  int run_index = 0;  ///< j in 1..nEX (0 when built directly from a seed)
  std::uint64_t trajectory_seed = 0;
  std::array<std::uint64_t, kModuleSeedCount> module_seeds{};

  std::uint64_t operator[](SeedId id) const {
    return module_seeds[static_cast<std::size_t>(id)];
  }
  std::uint64_t& operator[](SeedId id) {
    return module_seeds[static_cast<std::size_t>(id)];
  }
  bool operator==(const TrajectorySeedSet&) const = default;
};

/// xoshiro256** 1.0 seeded through splitmix64. Output is specified bit for
/// bit, so streams are identical on every platform. Satisfies
/// UniformRandomBitGenerator.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;
  static constexpr const char* kVersion = "xoshiro256**-1.0/splitmix64";

  explicit Xoshiro256(std::uint64_t seed);

  result_type operator()();
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  bool operator==(const Xoshiro256&) const = default;

 private:
  std::array<std::uint64_t, 4> s_{};
};

/// Seeded sampler over a single module stream. The distributions are
/// implemented here rather than taken from <random> because the standard
/// leaves their algorithms unspecified.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() {
    ++words_;
    return gen_();
  }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  /// Standard normal via Box-Muller; consumes exactly two words.
  double standard_normal();
  double normal(double mean, double std) { return mean + std * standard_normal(); }
  /// Integer uniform on the closed range [lo, hi], unbiased.
  std::int64_t discrete_uniform(std::int64_t lo, std::int64_t hi);

  /// Redraws `draw()` until `accept(value)` holds. Throws SamplingError after
  /// `cap` rejected draws.
  template <class Draw, class Accept>
  auto constrained(Draw&& draw, Accept&& accept, std::size_t cap = kDefaultCap) {
    for (std::size_t i = 0; i < cap; ++i) {
      auto v = draw(*this);
      if (accept(v)) return v;
    }
    throw SamplingError("constrained sampling exceeded the redraw cap");
  }

  /// Number of 64-bit words consumed so far.
  std::uint64_t words_consumed() const { return words_; }

  static constexpr std::size_t kDefaultCap = 1'000'000;

 private:
  Xoshiro256 gen_;
  std::uint64_t words_ = 0;
};

std::vector<std::uint64_t> derive_trajectory_seeds(MasterSeed master, int n_ex);
TrajectorySeedSet derive_module_seeds(std::uint64_t trajectory_seed, int run_index = 0);
/// Module seeds for runs 1..n_ex.
std::vector<TrajectorySeedSet> derive_seed_table(MasterSeed master, int n_ex);

/// Columnar audit dump: run_index trajectory_seed ACC GYR ... ALIGN
void write_seed_table(std::ostream& os, MasterSeed master,
                      const std::vector<TrajectorySeedSet>& table);

}  // namespace fwsim
