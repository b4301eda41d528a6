#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace lcqft {

// Shortest round-trip decimal representation of a double (%.17g trimmed).
std::string format_double(double v);

// Deterministic CSV output: header row, comma separator, '.' decimal point,
// LF line endings, binary stream (byte-identical across runs).
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void row_cells(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
};

// PASS/FAIL assertion log for a run.
class Summary {
 public:
  void add(const std::string& name, bool pass, const std::string& detail = "");
  void note(const std::string& text);
  bool all_pass() const { return failures_ == 0; }
  int failures() const { return failures_; }
  std::string text() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> lines_;
  int failures_ = 0;
};

void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& kv);

// Creates the directory (and parents); returns the normalized path.
std::string ensure_directory(const std::string& path);

}  // namespace lcqft
