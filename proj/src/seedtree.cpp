#include "fwsim/seedtree.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace fwsim {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) {
  for (auto& w : s_) w = splitmix64(seed);
}

Xoshiro256::result_type Xoshiro256::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Sampler::standard_normal() {
  // u1 in (0, 1] keeps the logarithm finite.
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::int64_t Sampler::discrete_uniform(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw SamplingError("discrete_uniform: empty range");
  const std::uint64_t range = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  if (range == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
  // Accepting only x >= 2^64 mod range leaves a multiple of `range` values,
  // so every residue is equally likely.
  const std::uint64_t threshold = (std::uint64_t{0} - range) % range;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x < threshold);
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + x % range);
}

std::vector<std::uint64_t> derive_trajectory_seeds(MasterSeed master, int n_ex) {
  if (n_ex < 1) throw ConfigError("nEX must be at least 1");
  Sampler s(master.value);
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(n_ex));
  for (auto& v : seeds) v = s.next_u64();
  return seeds;
}

TrajectorySeedSet derive_module_seeds(std::uint64_t trajectory_seed, int run_index) {
  TrajectorySeedSet set;
  set.run_index = run_index;
  set.trajectory_seed = trajectory_seed;
  Sampler s(trajectory_seed);
  for (auto& v : set.module_seeds) v = s.next_u64();
  return set;
}

std::vector<TrajectorySeedSet> derive_seed_table(MasterSeed master, int n_ex) {
  const auto seeds = derive_trajectory_seeds(master, n_ex);
  std::vector<TrajectorySeedSet> table;
  table.reserve(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i)
    table.push_back(derive_module_seeds(seeds[i], static_cast<int>(i) + 1));
  return table;
}

void write_seed_table(std::ostream& os, MasterSeed master,
                      const std::vector<TrajectorySeedSet>& table) {
  os << "# generator " << Xoshiro256::kVersion << "\n";
  os << "# master_seed " << master.value << "\n";
  os << "# run_index trajectory_seed";
  for (auto name : kSeedNames) os << ' ' << name;
  os << '\n';
  for (const auto& row : table) {
    os << row.run_index << ' ' << row.trajectory_seed;
    for (auto v : row.module_seeds) os << ' ' << v;
    os << '\n';
  }
}

}  // namespace fwsim
