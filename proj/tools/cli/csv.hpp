#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace momentest::cli {

/// Reads a header x1..xk followed by one observation per row. Throws
/// SampleError naming the row (1-based, header excluded) and column.
Eigen::MatrixXd read_observations(std::istream& in);

/// Writes the header x1..xk and rows with 17 significant digits.
void write_observations(std::ostream& out, const Eigen::MatrixXd& data);

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

/// Parses "a,b,c" into doubles; throws ConfigError naming `what`.
std::vector<double> parse_list(const std::string& text, const char* what);

}  // namespace momentest::cli
