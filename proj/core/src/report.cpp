#include "lcqft/report.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

namespace lcqft {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot open output file: " + path);
  row_cells(header);
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  row_cells(cells);
}

void CsvWriter::row_cells(const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

void Summary::add(const std::string& name, bool pass, const std::string& detail) {
  std::string line = (pass ? "PASS " : "FAIL ") + name;
  if (!detail.empty()) line += ": " + detail;
  lines_.push_back(std::move(line));
  if (!pass) ++failures_;
}

void Summary::note(const std::string& text) { lines_.push_back(text); }

std::string Summary::text() const {
  std::string out;
  for (const auto& l : lines_) {
    out += l;
    out += '\n';
  }
  return out;
}

void Summary::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text();
}

void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  for (const auto& [k, v] : kv) out << k << ": " << v << '\n';
}

std::string ensure_directory(const std::string& path) {
  std::filesystem::path p(path);
  std::filesystem::create_directories(p);
  return p.string();
}

}  // namespace lcqft
