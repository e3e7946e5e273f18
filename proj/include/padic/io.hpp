#pragma once

#include "padic/function_space.hpp"
#include "padic/pme_solver.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <filesystem>
#include <string>

namespace padic::io {

/// Writes through a temporary file in the same directory and renames it over
/// the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string format_double(double x);

/// "index,center,abs,re,im"
std::string grid_function_csv(const GridFunction& u);
/// Parses a grid CSV back; the index and center columns must match `grid`.
GridFunction read_grid_function_csv(const std::filesystem::path& path, const GridSpec& grid);

/// "k,shell_abs,re,im" per stored shell, a "zero" row for |x| < p^{k_min}
/// and, when present, "tail,c,s".
std::string radial_function_csv(const RadialFunction& f);

/// "i,j,value", row-major.
std::string matrix_csv(const Eigen::MatrixXd& A);

struct InitialCondition {
    std::string kind;  // indicator | radial_power | csv
    nlohmann::json spec;
};

struct EvolveConfig {
    PMEProblem problem;
    InitialCondition initial;
    std::size_t snapshot_every = 1;
    nlohmann::json raw;
};

/// Validates the evolve schema; violations raise ConfigError naming the field.
EvolveConfig parse_evolve_config(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");

/// Samples the initial condition on the problem grid.
GridFunction build_initial(const EvolveConfig& cfg, const std::filesystem::path& base_dir = ".");

} // namespace padic::io
