#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fgp {

// Fixed results schema; floats rendered with 17 significant digits so a
// given (config, seed) reproduces results.csv byte for byte.
struct ResultRow {
  std::string experiment_id;
  std::string kind;
  std::string quantity;
  double value = 0.0;
  double stderr_ = 0.0;
  double aux1 = 0.0;
  double aux2 = 0.0;
  std::uint64_t seed = 0;
};

std::string format_float(double v);  // %.17g
std::string results_csv(const std::vector<ResultRow>& rows);
void write_text_file(const std::string& path, const std::string& content);

// Two-column (or more) whitespace-separated series with a '#' header line.
void emit_plotdata(const std::vector<std::vector<double>>& series,
                   const std::vector<std::string>& column_names,
                   const std::string& path);

std::uint64_t fnv1a(const std::string& text);

}  // namespace fgp
