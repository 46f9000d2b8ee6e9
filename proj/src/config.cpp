#include "fwsim/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "fwsim/error.hpp"

namespace fwsim {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view text, const std::string& key, const std::string& source) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ConfigError(source + ": key '" + key + "': cannot parse '" + std::string(text) + "'");
  return v;
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::istream& in, std::string source) {
  KeyValueFile f;
  f.source_ = std::move(source);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(f.source_ + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key(trim(s.substr(0, eq)));
    const std::string value(trim(s.substr(eq + 1)));
    if (key.empty())
      throw ConfigError(f.source_ + ":" + std::to_string(lineno) + ": empty key");
    if (!f.values_.emplace(key, value).second)
      throw ConfigError(f.source_ + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return f;
}

KeyValueFile KeyValueFile::parse_string(std::string_view text, std::string source) {
  std::istringstream in{std::string(text)};
  return parse(in, std::move(source));
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in, path.string());
}

const std::string& KeyValueFile::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(source_ + ": missing key '" + key + "'");
  used_.insert(key);
  return it->second;
}

std::string KeyValueFile::get_string(const std::string& key) const { return raw(key); }

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

double KeyValueFile::get_double(const std::string& key) const {
  return parse_number<double>(raw(key), key, source_);
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long KeyValueFile::get_int(const std::string& key) const {
  return parse_number<long long>(raw(key), key, source_);
}

long long KeyValueFile::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t KeyValueFile::get_u64(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? parse_number<std::uint64_t>(raw(key), key, source_) : fallback;
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& v = raw(key);
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError(source_ + ": key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<double> KeyValueFile::get_doubles(const std::string& key, std::size_t expected) const {
  std::istringstream in(raw(key));
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_number<double>(tok, key, source_));
  if (expected != 0 && out.size() != expected)
    throw ConfigError(source_ + ": key '" + key + "' needs " + std::to_string(expected) +
                      " values, got " + std::to_string(out.size()));
  return out;
}

void KeyValueFile::reject_unused() const {
  std::string unknown;
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
  if (!unknown.empty()) throw ConfigError(source_ + ": unknown keys: " + unknown);
}

std::string KeyValueFile::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t h) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
  return s;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace fwsim
