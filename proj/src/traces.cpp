#include "fwsim/traces.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "fwsim/error.hpp"

namespace fwsim {

namespace {
constexpr std::size_t kFlushSize = 1 << 20;
}

TraceWriter::TraceWriter(const std::filesystem::path& path, const std::string& kind,
                         const Provenance& prov, const std::vector<std::string>& columns,
                         const std::vector<std::pair<std::string, std::string>>& extra)
    : out_(path, std::ios::binary), columns_(columns.size()), path_(path) {
  if (!out_) throw Error("cannot write " + path.string());
  buf_ += "# fwsim " + kind + "\n";
  buf_ += "# master_seed " + std::to_string(prov.master_seed) + "\n";
  buf_ += "# run_index " + std::to_string(prov.run_index) + "\n";
  buf_ += "# config_hash " + prov.config_hash + "\n";
  for (const auto& [k, v] : extra) buf_ += "# " + k + " " + v + "\n";
  buf_ += "# columns";
  for (const auto& c : columns) buf_ += " " + c;
  buf_ += "\n";
}

TraceWriter::~TraceWriter() {
  try {
    close();
  } catch (...) {
  }
}

void TraceWriter::row(std::span<const double> values) {
  if (columns_ && values.size() != columns_)
    throw Error("trace row width mismatch in " + path_.string());
  char tmp[32];
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) buf_ += ' ';
    const double v = values[i] == 0.0 ? 0.0 : values[i];  // no "-0"
    const auto r = std::to_chars(tmp, tmp + sizeof tmp, v);
    buf_.append(tmp, r.ptr);
  }
  buf_ += '\n';
  ++rows_;
  if (buf_.size() >= kFlushSize) flush_buffer();
}

void TraceWriter::line(std::string_view text) {
  buf_.append(text);
  buf_ += '\n';
  ++rows_;
  if (buf_.size() >= kFlushSize) flush_buffer();
}

void TraceWriter::flush_buffer() {
  out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  buf_.clear();
  if (!out_) throw Error("write failed for " + path_.string());
}

void TraceWriter::close() {
  if (!out_.is_open()) return;
  flush_buffer();
  out_.close();
}

const std::vector<double>& TraceTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw Error("trace has no column '" + name + "'");
  return data[static_cast<std::size_t>(it - columns.begin())];
}

TraceTable read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  TraceTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string key;
      ss >> key;
      if (key == "columns") {
        std::string c;
        while (ss >> c) t.columns.push_back(c);
        t.data.assign(t.columns.size(), {});
      } else if (!key.empty()) {
        std::string rest;
        std::getline(ss >> std::ws, rest);
        t.header[key] = rest;
      }
      continue;
    }
    if (t.columns.empty()) throw Error(path.string() + ": data before the columns header");
    const char* p = line.data();
    const char* end = p + line.size();
    std::size_t col = 0;
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double v;
      const auto r = std::from_chars(p, end, v);
      if (r.ec != std::errc() || col >= t.columns.size())
        throw Error(path.string() + ":" + std::to_string(lineno) + ": malformed row");
      t.data[col++].push_back(v);
      p = r.ptr;
    }
    if (col != t.columns.size())
      throw Error(path.string() + ":" + std::to_string(lineno) + ": expected " +
                  std::to_string(t.columns.size()) + " values");
  }
  return t;
}

std::size_t count_trace_rows(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') ++rows;
  return rows;
}

}  // namespace fwsim
