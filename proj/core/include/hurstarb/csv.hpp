#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace hurstarb::csv {

// Shortest decimal text that round-trips to the same double; "nan" for NaN.
std::string format(double v);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

// Parses a full field as a double; throws std::invalid_argument on junk.
double parse_double(std::string_view field);
long long parse_int(std::string_view field);

// Writes `tickers` as a header row followed by one row per matrix row.
void write_matrix(std::ostream& out, const std::vector<std::string>& tickers,
                  const Eigen::MatrixXd& m);

struct LabeledMatrix {
  std::vector<std::string> tickers;
  Eigen::MatrixXd values;
};
LabeledMatrix read_matrix(std::istream& in);

// Opens `path` for writing, creating parent directories; throws DataError.
std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

}  // namespace hurstarb::csv
