#include "coat/io/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace coat {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;  // %.17g always round-trips
}

void write_iterations_csv(const std::string& path,
                          const std::vector<RunRecord>& history, int dims,
                          bool log_wall_ms) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("csv: cannot open '" + path + "' for writing");
  out << "n,theta_idx";
  for (int d = 0; d < dims; ++d) out << ",theta_" << d;
  out << ",y,tau,violated,goal_idx,pess_size,opti_size,in_pess,wall_ms\n";
  for (const RunRecord& r : history) {
    out << r.n << ',' << r.theta_index;
    for (int d = 0; d < dims; ++d) out << ',' << format_double(r.theta_coords[d]);
    out << ',' << format_double(r.y) << ',' << format_double(r.tau) << ','
        << (r.violated ? 1 : 0) << ',' << r.goal_index << ',' << r.pess_size
        << ',' << r.opti_size << ',' << (r.in_pess ? 1 : 0) << ','
        << (log_wall_ms ? format_double(r.wall_millis) : "0") << "\n";
  }
  if (!out) throw std::runtime_error("csv: write failed for '" + path + "'");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double to_double(const std::string& s, int lineno) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw std::runtime_error("csv: line " + std::to_string(lineno) +
                             ": bad number '" + s + "'");
  return v;
}

std::int64_t to_int(const std::string& s, int lineno) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("csv: line " + std::to_string(lineno) +
                             ": bad integer '" + s + "'");
  }
}

}  // namespace

IterationsCsv read_iterations_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty file '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  int dims = 0;
  for (const std::string& col : header) {
    if (col.rfind("theta_", 0) == 0 && col != "theta_idx") ++dims;
  }
  if (dims == 0 || header.size() != static_cast<std::size_t>(dims) + 10)
    throw std::runtime_error("csv: unrecognized header in '" + path + "'");

  IterationsCsv result;
  result.dims = dims;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size())
      throw std::runtime_error("csv: line " + std::to_string(lineno) +
                               ": wrong field count");
    RunRecord r;
    int c = 0;
    r.n = static_cast<int>(to_int(f[c++], lineno));
    r.theta_index = to_int(f[c++], lineno);
    r.theta_coords.resize(dims);
    for (int d = 0; d < dims; ++d) r.theta_coords[d] = to_double(f[c++], lineno);
    r.y = to_double(f[c++], lineno);
    r.tau = to_double(f[c++], lineno);
    r.violated = to_int(f[c++], lineno) != 0;
    r.goal_index = to_int(f[c++], lineno);
    r.pess_size = to_int(f[c++], lineno);
    r.opti_size = to_int(f[c++], lineno);
    r.in_pess = to_int(f[c++], lineno) != 0;
    r.wall_millis = to_double(f[c++], lineno);
    result.records.push_back(std::move(r));
  }
  return result;
}

}  // namespace coat
