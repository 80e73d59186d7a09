#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "kleinopt/geometry.hpp"
#include "kleinopt/seminmf.hpp"
#include "kleinopt/solvers.hpp"

namespace kleinopt {

/// Raised for unreadable or malformed input files (CLI exit code 2).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Solver trace as CSV with header `k,evals,f_best,step,moved,ms`. The ms
/// column is written as 0 so identical (config, seed) runs produce
/// byte-identical files; wall-clock timing is reported in the run summary.
std::string trace_csv_string(const std::vector<TraceRecord>& trace);
void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& trace);

/// Semi-NMF trace as CSV with header `i,eps_i,alpha_i,step_type`.
std::string seminmf_trace_csv_string(const std::vector<SemiNmfTraceRow>& trace);
void write_seminmf_trace_csv(const std::string& path, const std::vector<SemiNmfTraceRow>& trace);

/// Point as JSON: geometry metadata plus the matrix as a row-major array of
/// arrays.
std::string point_json_string(const Point& p);
void write_point_json(const std::string& path, const Point& p);

std::string matrix_json_string(const Matrix& m);
void write_matrix_json(const std::string& path, const Matrix& m);

/// Reads a matrix from CSV (rows = dimensions, columns = samples). Malformed
/// rows raise IoError naming the offending row.
Matrix read_matrix_csv(const std::string& path);

/// Reads a matrix from a JSON array of arrays (or {"matrix": [[...]]}).
Matrix read_matrix_json(const std::string& path);

}  // namespace kleinopt
