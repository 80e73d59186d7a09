#include "kleinopt/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace kleinopt {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& rows, const std::string& origin) {
  if (!rows.is_array() || rows.empty()) {
    throw IoError(origin + ": expected a non-empty array of rows");
  }
  const std::size_t ncols = rows[0].is_array() ? rows[0].size() : 0;
  if (ncols == 0) throw IoError(origin + ": row 1 is not a non-empty array");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ncols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != ncols) {
      throw IoError(origin + ": row " + std::to_string(i + 1) + " has inconsistent length");
    }
    for (std::size_t j = 0; j < ncols; ++j) {
      if (!rows[i][j].is_number()) {
        throw IoError(origin + ": row " + std::to_string(i + 1) + " has a non-numeric entry");
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
    }
  }
  return m;
}

}  // namespace

std::string trace_csv_string(const std::vector<TraceRecord>& trace) {
  std::string out = "k,evals,f_best,step,moved,ms\n";
  for (const TraceRecord& row : trace) {
    out += std::to_string(row.k);
    out += ',';
    out += std::to_string(row.evals);
    out += ',';
    out += format_double(row.f_best);
    out += ',';
    out += format_double(row.step);
    out += ',';
    out += row.moved ? '1' : '0';
    out += ",0\n";
  }
  return out;
}

void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& trace) {
  write_file(path, trace_csv_string(trace));
}

std::string seminmf_trace_csv_string(const std::vector<SemiNmfTraceRow>& trace) {
  std::string out = "i,eps_i,alpha_i,step_type\n";
  for (const SemiNmfTraceRow& row : trace) {
    out += std::to_string(row.i);
    out += ',';
    out += format_double(row.eps);
    out += ',';
    out += format_double(row.alpha);
    out += ',';
    out += step_type_name(row.step);
    out += '\n';
  }
  return out;
}

void write_seminmf_trace_csv(const std::string& path, const std::vector<SemiNmfTraceRow>& trace) {
  write_file(path, seminmf_trace_csv_string(trace));
}

std::string point_json_string(const Point& p) {
  nlohmann::json doc;
  doc["geometry"] = p.geometry.name();
  doc["n"] = p.geometry.n();
  if (p.geometry.space() == Space::Grassmannian || p.geometry.space() == Space::Stiefel) {
    doc["k"] = p.geometry.k();
  }
  doc["rows"] = p.value.rows();
  doc["cols"] = p.value.cols();
  doc["matrix"] = matrix_to_json(p.value);
  return doc.dump(2) + "\n";
}

void write_point_json(const std::string& path, const Point& p) {
  write_file(path, point_json_string(p));
}

std::string matrix_json_string(const Matrix& m) {
  nlohmann::json doc;
  doc["rows"] = m.rows();
  doc["cols"] = m.cols();
  doc["matrix"] = matrix_to_json(m);
  return doc.dump(2) + "\n";
}

void write_matrix_json(const std::string& path, const Matrix& m) {
  write_file(path, matrix_json_string(m));
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        throw IoError(path + ": row " + std::to_string(lineno) + ": cannot parse '" + cell + "'");
      }
    }
    if (row.empty()) {
      throw IoError(path + ": row " + std::to_string(lineno) + ": no values");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw IoError(path + ": row " + std::to_string(lineno) + ": expected " +
                    std::to_string(rows.front().size()) + " values, found " +
                    std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path + ": empty file");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

Matrix read_matrix_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": invalid JSON: " + e.what());
  }
  if (doc.is_object() && doc.contains("matrix")) {
    return matrix_from_json(doc["matrix"], path);
  }
  return matrix_from_json(doc, path);
}

}  // namespace kleinopt
