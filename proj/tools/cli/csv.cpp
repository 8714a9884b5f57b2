#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "momentest/error.hpp"

namespace momentest::cli {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& text, double& value) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end && begin != end;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Eigen::MatrixXd read_observations(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SampleError("input is empty; expected header x1..xk");
  const auto header = split(line);
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string expected = "x" + std::to_string(j + 1);
    if (trim(header[j]) != expected) {
      throw SampleError("header column " + std::to_string(j + 1) + " is '" + trim(header[j]) +
                        "', expected '" + expected + "'");
    }
  }
  const std::size_t k = header.size();
  std::vector<double> values;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split(line);
    if (cells.size() != k) {
      throw SampleError("row " + std::to_string(row) + ": expected " + std::to_string(k) +
                        " columns, found " + std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < k; ++j) {
      double v = 0.0;
      const std::string cell = trim(cells[j]);
      if (!parse_double(cell, v) || !std::isfinite(v)) {
        throw SampleError("row " + std::to_string(row) + ": column x" + std::to_string(j + 1) +
                          " value '" + cell + "' is not a finite number");
      }
      values.push_back(v);
    }
  }
  if (row == 0) throw SampleError("input has a header but no observations");
  Eigen::MatrixXd data(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(k));
  for (std::size_t r = 0; r < row; ++r) {
    for (std::size_t j = 0; j < k; ++j) {
      data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = values[r * k + j];
    }
  }
  return data;
}

void write_observations(std::ostream& out, const Eigen::MatrixXd& data) {
  for (Eigen::Index j = 0; j < data.cols(); ++j) out << (j ? ",x" : "x") << j + 1;
  out << '\n';
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      out << (j ? "," : "") << format_double(data(r, j));
    }
    out << '\n';
  }
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const auto& raw : split(text)) {
    double v = 0.0;
    const std::string cell = trim(raw);
    if (!parse_double(cell, v)) {
      throw ConfigError(std::string(what) + ": '" + cell + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(std::string(what) + " is empty");
  return out;
}

}  // namespace momentest::cli
