#pragma once

// Columnar text traces. Each file starts with '#'-prefixed header lines
//
//   # fwsim <kind>
//   # master_seed <u64>
//   # run_index <j>
//   # config_hash <16 hex digits>
//   # <extra key> <value>        (optional, any number)
//   # columns <name> <name> ...
//
// followed by one whitespace-separated row per epoch. Numbers are written in
// their shortest round-trip decimal form.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace fwsim {

struct Provenance {
  std::uint64_t master_seed = 0;
  int run_index = 0;
  std::string config_hash;
};

class TraceWriter {
 public:
  TraceWriter(const std::filesystem::path& path, const std::string& kind,
              const Provenance& prov, const std::vector<std::string>& columns,
              const std::vector<std::pair<std::string, std::string>>& extra = {});
  ~TraceWriter();
  TraceWriter(const TraceWriter&) = delete;
  TraceWriter& operator=(const TraceWriter&) = delete;

  void row(std::span<const double> values);
  void row(std::initializer_list<double> values) { row(std::span(values.begin(), values.size())); }
  /// Appends a preformatted line (a newline is added).
  void line(std::string_view text);
  void close();
  std::size_t rows() const { return rows_; }

 private:
  void flush_buffer();

  std::ofstream out_;
  std::string buf_;
  std::size_t columns_ = 0;
  std::size_t rows_ = 0;
  std::filesystem::path path_;
};

struct TraceTable {
  std::map<std::string, std::string> header;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  ///< column-major

  std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
  /// Throws Error when the column is missing.
  const std::vector<double>& column(const std::string& name) const;
};

/// Throws Error on malformed content.
TraceTable read_trace(const std::filesystem::path& path);

/// Counts data rows without parsing them.
std::size_t count_trace_rows(const std::filesystem::path& path);

}  // namespace fwsim
