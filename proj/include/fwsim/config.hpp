#pragma once

// Line-oriented key-value files:
//
//   # comment
//   key = value            (value may hold several whitespace-separated tokens)
//
// Keys are unique per file. Lookups record which keys were consumed so callers
// can reject misspelled entries with `reject_unused()`.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace fwsim {

class KeyValueFile {
 public:
  KeyValueFile() = default;

  static KeyValueFile parse(std::istream& in, std::string source = "<stream>");
  static KeyValueFile parse_string(std::string_view text, std::string source = "<string>");
  static KeyValueFile load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, std::size_t expected) const;

  /// Throws ConfigError naming every key that was never looked up.
  void reject_unused() const;

  const std::map<std::string, std::string>& values() const { return values_; }
  const std::string& source() const { return source_; }

  /// Canonical "key = value" lines in key order.
  std::string canonical() const;

 private:
  const std::string& raw(const std::string& key) const;

  std::string source_;
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL);
/// Fixed-width lowercase hex rendering of a 64-bit hash.
std::string hex64(std::uint64_t v);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace fwsim
