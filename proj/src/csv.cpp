#include "phmor/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace phmor {

std::string format_double(double value) {
  std::array<char, 40> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::scientific, 16);
  if (res.ec != std::errc()) {
    throw NumericalError("format_double: conversion failed");
  }
  return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw IoError("parse_double: malformed number \"" + text + "\"");
  }
  return value;
}

namespace {

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out << ',';
    out << cells[i];
  }
  out << '\n';
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_row(out, header);
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw IoError("write_csv: ragged row while writing " + path.string());
    }
    write_row(out, row);
  }
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

void write_errors_csv(const std::filesystem::path& path,
                      const std::vector<CellResult>& cells) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(cells.size());
  for (const CellResult& cell : cells) {
    std::vector<std::string> row;
    row.push_back(method_name(cell.method));
    row.push_back(std::to_string(cell.r));
    if (cell.metrics) {
      row.push_back(format_double(cell.metrics->e_x_red));
      row.push_back(format_double(cell.metrics->e_x_proj));
      row.push_back(cell.metrics->e_x_lowerbound
                        ? format_double(*cell.metrics->e_x_lowerbound)
                        : std::string());
      row.push_back(format_double(cell.metrics->e_y));
    } else {
      row.insert(row.end(), 4, std::string());
    }
    rows.push_back(std::move(row));
  }
  write_csv(path, {"method", "r", "e_x_red", "e_x_proj", "e_x_lowerbound", "e_y"}, rows);
}

void write_energy_csv(const std::filesystem::path& path, const ExperimentResult& result) {
  std::vector<std::string> header = {"t", "error_energy_fom"};
  for (const auto& [method, series] : result.rom_energy_errors) {
    header.push_back("error_energy_" + method_name(method));
  }
  const Index np = result.energy_time.size();
  std::vector<std::vector<std::string>> rows;
  rows.reserve(static_cast<size_t>(np));
  for (Index i = 0; i < np; ++i) {
    std::vector<std::string> row;
    row.push_back(format_double(result.energy_time(i)));
    row.push_back(format_double(result.fom_energy_error(i)));
    for (const auto& [method, series] : result.rom_energy_errors) {
      if (series.size() != np) {
        throw IoError("write_energy_csv: series length mismatch for " + method_name(method));
      }
      row.push_back(format_double(series(i)));
    }
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::vector<std::string> header = {"t"};
  for (Index i = 0; i < traj.states.rows(); ++i) header.push_back("x" + std::to_string(i));
  for (Index i = 0; i < traj.outputs.rows(); ++i) header.push_back("y" + std::to_string(i));
  std::vector<std::vector<std::string>> rows;
  rows.reserve(static_cast<size_t>(traj.grid.points()));
  for (Index i = 0; i < traj.grid.points(); ++i) {
    std::vector<std::string> row;
    row.push_back(format_double(traj.grid.time(i)));
    for (Index k = 0; k < traj.states.rows(); ++k) {
      row.push_back(format_double(traj.states(k, i)));
    }
    for (Index k = 0; k < traj.outputs.rows(); ++k) {
      row.push_back(format_double(traj.outputs(k, i)));
    }
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& matrix) {
  std::vector<std::string> header;
  for (Index c = 0; c < matrix.cols(); ++c) header.push_back("c" + std::to_string(c));
  std::vector<std::vector<std::string>> rows;
  rows.reserve(static_cast<size_t>(matrix.rows()));
  for (Index r = 0; r < matrix.rows(); ++r) {
    std::vector<std::string> row;
    for (Index c = 0; c < matrix.cols(); ++c) row.push_back(format_double(matrix(r, c)));
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV file " + path.string());
  std::vector<std::vector<double>> rows;
  size_t width = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_row(line);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const std::string& cell : cells) row.push_back(parse_double(cell));
    if (width == 0) width = row.size();
    if (row.size() != width) throw IoError("ragged CSV row in " + path.string());
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < width; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    }
  }
  return m;
}

}  // namespace phmor
