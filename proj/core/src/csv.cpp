#include "hurstarb/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "hurstarb/error.hpp"

namespace hurstarb::csv {

std::string format(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("to_chars failed");
  return std::string(buf, ptr);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

static std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view field) {
  field = trim(field);
  if (field == "nan") return std::nan("");
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
    throw std::invalid_argument("not a number: '" + std::string(field) + "'");
  return v;
}

long long parse_int(std::string_view field) {
  field = trim(field);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
    throw std::invalid_argument("not an integer: '" + std::string(field) + "'");
  return v;
}

void write_matrix(std::ostream& out, const std::vector<std::string>& tickers,
                  const Eigen::MatrixXd& m) {
  for (std::size_t i = 0; i < tickers.size(); ++i) out << (i ? "," : "") << tickers[i];
  out << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format(m(r, c));
    out << '\n';
  }
}

LabeledMatrix read_matrix(std::istream& in) {
  LabeledMatrix lm;
  std::string line;
  if (!std::getline(in, line)) throw DataError("matrix CSV: missing header");
  for (auto f : split(line)) lm.tickers.emplace_back(trim(f));
  const auto n = static_cast<Eigen::Index>(lm.tickers.size());
  lm.values.resize(n, n);
  Eigen::Index r = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (r >= n) throw DataError("matrix CSV: more rows than header columns");
    const auto fields = split(line);
    if (static_cast<Eigen::Index>(fields.size()) != n)
      throw DataError("matrix CSV: row " + std::to_string(r + 2) + " has wrong column count");
    for (Eigen::Index c = 0; c < n; ++c) {
      try {
        lm.values(r, c) = parse_double(fields[static_cast<std::size_t>(c)]);
      } catch (const std::invalid_argument& e) {
        throw DataError("matrix CSV line " + std::to_string(r + 2) + ": " + e.what());
      }
    }
    ++r;
  }
  if (r != n) throw DataError("matrix CSV: expected " + std::to_string(n) + " rows");
  return lm;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open for reading: " + path.string());
  return in;
}

}  // namespace hurstarb::csv
