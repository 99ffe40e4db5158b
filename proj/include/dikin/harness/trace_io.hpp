#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dikin/linalg.hpp"

namespace dikin::harness {

/// Recorded (thinned) rows of one chain.
struct ChainTrace {
  Eigen::Index dimension = 0;
  std::vector<std::int64_t> iter;
  std::vector<std::uint8_t> accepted;
  std::vector<double> step_size;
  std::vector<double> positions; // row-major, rows() x dimension

  std::size_t rows() const { return iter.size(); }
  Vector position(std::size_t row) const;
  void append(std::int64_t it, bool acc, double h, const Vector &x);
};

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// Header `iter,accepted,h,x_1,...,x_d`.
void write_trace_csv(const std::filesystem::path &path, const ChainTrace &trace);

/// Throws IoError with the path and line on malformed input.
ChainTrace read_trace_csv(const std::filesystem::path &path);

/// Writes `text` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path &path, const std::string &text);

std::string read_text_file(const std::filesystem::path &path);

} // namespace dikin::harness
