#pragma once

// Deterministic CSV persistence for per-iteration run logs.
//
// Layout (one row per tuner iteration, d = grid dimensionality):
//   n,theta_idx,theta_0,...,theta_{d-1},y,tau,violated,goal_idx,pess_size,opti_size,in_pess,wall_ms
//
// Numbers are printed with the shortest decimal form that round-trips to the
// exact double, so reading a file back reproduces bit-identical values and
// identical runs produce byte-identical files.  The wall_ms column is logged
// as 0 unless wall-clock logging is enabled, because elapsed times would
// break byte-level reproducibility.

#include <string>
#include <vector>

#include "coat/tuner.hpp"

namespace coat {

/// Shortest decimal string that parses back to exactly `v`.
/// Non-finite values render as "nan" / "inf" / "-inf".
std::string format_double(double v);

void write_iterations_csv(const std::string& path,
                          const std::vector<RunRecord>& history, int dims,
                          bool log_wall_ms);

struct IterationsCsv {
  int dims = 0;
  std::vector<RunRecord> records;
};

/// Parses a file written by write_iterations_csv; throws std::runtime_error
/// with the offending line number on malformed input.
IterationsCsv read_iterations_csv(const std::string& path);

}  // namespace coat
