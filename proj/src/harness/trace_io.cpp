#include "dikin/harness/trace_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "dikin/errors.hpp"

namespace dikin::harness {

Vector ChainTrace::position(std::size_t row) const {
  return Eigen::Map<const Vector>(
      positions.data() + row * static_cast<std::size_t>(dimension), dimension);
}

void ChainTrace::append(std::int64_t it, bool acc, double h, const Vector &x) {
  iter.push_back(it);
  accepted.push_back(acc ? 1 : 0);
  step_size.push_back(h);
  positions.insert(positions.end(), x.data(), x.data() + x.size());
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc())
    throw IoError("cannot format number");
  return std::string(buf.data(), p);
}

void write_trace_csv(const std::filesystem::path &path, const ChainTrace &trace) {
  std::string out;
  out.reserve(trace.rows() * static_cast<std::size_t>(trace.dimension + 3) * 20 + 64);
  out += "iter,accepted,h";
  for (Eigen::Index j = 0; j < trace.dimension; ++j)
    out += ",x_" + std::to_string(j + 1);
  out += '\n';
  const auto d = static_cast<std::size_t>(trace.dimension);
  for (std::size_t r = 0; r < trace.rows(); ++r) {
    out += std::to_string(trace.iter[r]);
    out += trace.accepted[r] ? ",1," : ",0,";
    out += format_double(trace.step_size[r]);
    for (std::size_t j = 0; j < d; ++j) {
      out += ',';
      out += format_double(trace.positions[r * d + j]);
    }
    out += '\n';
  }
  write_text_file(path, out);
}

namespace {

template <class T>
T parse_field(std::string_view field, const std::filesystem::path &path,
              std::size_t line) {
  T v{};
  auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || p != field.data() + field.size())
    throw IoError(path.string() + ":" + std::to_string(line) +
                  ": malformed field '" + std::string(field) + "'");
  return v;
}

} // namespace

ChainTrace read_trace_csv(const std::filesystem::path &path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw IoError(path.string() + ": empty trace file");
  if (line.rfind("iter,accepted,h", 0) != 0)
    throw IoError(path.string() + ":1: unexpected header '" + line + "'");

  ChainTrace trace;
  std::size_t cols = 1;
  for (char c : line)
    cols += c == ',' ? 1 : 0;
  if (cols < 4)
    throw IoError(path.string() + ":1: header has no coordinates");
  trace.dimension = static_cast<Eigen::Index>(cols - 3);

  std::size_t lineno = 1;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty())
      continue;
    fields.clear();
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos)
        break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != cols)
      throw IoError(path.string() + ":" + std::to_string(lineno) +
                    ": expected " + std::to_string(cols) + " fields");
    trace.iter.push_back(parse_field<std::int64_t>(fields[0], path, lineno));
    trace.accepted.push_back(
        static_cast<std::uint8_t>(parse_field<int>(fields[1], path, lineno)));
    trace.step_size.push_back(parse_field<double>(fields[2], path, lineno));
    for (std::size_t j = 3; j < cols; ++j)
      trace.positions.push_back(parse_field<double>(fields[j], path, lineno));
  }
  return trace;
}

void write_text_file(const std::filesystem::path &path, const std::string &text) {
  std::error_code ec;
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path(), ec);
  if (ec)
    throw IoError("cannot create directory '" + path.parent_path().string() +
                  "': " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out)
    throw IoError("write to '" + path.string() + "' failed");
}

std::string read_text_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot read '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

} // namespace dikin::harness
