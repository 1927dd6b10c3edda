#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "phmor/experiment.hpp"
#include "phmor/integrate.hpp"
#include "phmor/types.hpp"

namespace phmor {

// Scientific notation with 17 significant digits: every double round-trips to
// the identical bit pattern, with no locale dependence.
std::string format_double(double value);
double parse_double(const std::string& text);  // IoError on malformed input

// Generic rectangular table; all I/O failures surface as IoError with the path.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// header: method,r,e_x_red,e_x_proj,e_x_lowerbound,e_y. Failed cells and
// non-applicable lower bounds are emitted as empty fields.
void write_errors_csv(const std::filesystem::path& path, const std::vector<CellResult>& cells);

// header: t,error_energy_fom,error_energy_<method>... for the series captured
// at the probe order.
void write_energy_csv(const std::filesystem::path& path, const ExperimentResult& result);

// header: t,x0,...,x{N-1},y0,...,y{m-1}; one row per grid point.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

// header: c0,...,c{cols-1}; one row per matrix row.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& matrix);
Matrix read_matrix_csv(const std::filesystem::path& path);  // skips the header row

}  // namespace phmor
