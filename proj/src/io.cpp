#include "fgp/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fgp {

std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "experiment_id,kind,quantity,value,stderr,aux1,aux2,seed\n";
  for (const auto& r : rows)
    os << r.experiment_id << ',' << r.kind << ',' << r.quantity << ','
       << format_float(r.value) << ',' << format_float(r.stderr_) << ','
       << format_float(r.aux1) << ',' << format_float(r.aux2) << ',' << r.seed
       << "\n";
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path);
}

void emit_plotdata(const std::vector<std::vector<double>>& series,
                   const std::vector<std::string>& column_names,
                   const std::string& path) {
  if (series.empty())
    throw std::invalid_argument("emit_plotdata: empty series");
  std::ostringstream os;
  os << "#";
  for (const auto& n : column_names) os << ' ' << n;
  os << "\n";
  for (const auto& row : series) {
    if (row.size() != column_names.size())
      throw std::invalid_argument("emit_plotdata: ragged series row");
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? " " : "") << format_float(row[i]);
    os << "\n";
  }
  write_text_file(path, os.str());
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace fgp
