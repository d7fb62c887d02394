#pragma once

#include <string>
#include <vector>

namespace stiffchaos::cli {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column index by header name; throws std::out_of_range when absent.
  [[nodiscard]] std::size_t column(const std::string& name) const;
};

/// 17 significant digits, so every finite double round-trips exactly.
/// Non-finite values are written as inf, -inf and nan.
[[nodiscard]] std::string format_double(double v);

/// Writes header and rows; throws std::runtime_error on I/O failure.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

[[nodiscard]] CsvTable read_csv(const std::string& path);

}  // namespace stiffchaos::cli
