#include "padic/io.hpp"

#include "padic/errors.hpp"

#include <cstdio>
#include <fstream>
#include <algorithm>
#include <sstream>
#include <unistd.h>

namespace padic::io {

namespace fs = std::filesystem;
using nlohmann::json;

void write_atomic(const fs::path& path, const std::string& content) {
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    fs::create_directories(dir);
    const fs::path tmp = dir / (path.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out << content;
        out.flush();
        if (!out) {
            throw std::runtime_error("write to " + tmp.string() + " failed");
        }
    }
    fs::rename(tmp, path);
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string grid_function_csv(const GridFunction& u) {
    const GridSpec& g = u.grid();
    std::ostringstream os;
    os << "index,center,abs,re,im\n";
    for (std::size_t i = 0; i < g.dim(); ++i) {
        const PAdicExpansion x = g.representative(i);
        // the encoding itself contains commas, so the field is quoted
        os << i << ",\"" << x.encode() << "\"," << to_string(abs_value(x)) << ',' << format_double(u[i].real()) << ','
           << format_double(u[i].imag()) << '\n';
    }
    return os.str();
}

namespace {

// RFC 4180 fields: double quotes protect separators, "" is a literal quote.
std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                out.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == sep) {
            out.emplace_back();
        } else {
            out.back() += c;
        }
    }
    if (quoted) {
        throw ConfigError("unterminated quote in '" + line + "'");
    }
    return out;
}

double parse_number(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where + ": '" + s + "' is not a number");
    }
}

} // namespace

GridFunction read_grid_function_csv(const fs::path& path, const GridSpec& grid) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != "index,center,abs,re,im") {
        throw ConfigError(path.string() + ": expected header 'index,center,abs,re,im'");
    }
    std::vector<Complex> values;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const std::string where = path.string() + " row " + std::to_string(row + 1);
        const auto f = split(line, ',');
        if (f.size() != 5) {
            throw ConfigError(where + ": expected 5 fields");
        }
        if (f[0] != std::to_string(row)) {
            throw ConfigError(where + ": index out of order");
        }
        if (row >= grid.dim()) {
            throw ConfigError(where + ": more rows than the grid has cosets");
        }
        if (f[1] != grid.representative(row).encode()) {
            throw ConfigError(where + ": center " + f[1] + " does not match the grid representative");
        }
        values.emplace_back(parse_number(f[3], where), parse_number(f[4], where));
        ++row;
    }
    if (row != grid.dim()) {
        throw ConfigError(path.string() + ": expected " + std::to_string(grid.dim()) + " rows, found " + std::to_string(row));
    }
    return GridFunction(grid, std::move(values));
}

std::string radial_function_csv(const RadialFunction& f) {
    std::ostringstream os;
    os << "k,shell_abs,re,im\n";
    for (int k = f.k_min(); k <= f.k_max(); ++k) {
        const Complex v = f.shell_value(k);
        os << k << ',' << to_string(rational_power(f.prime(), k)) << ',' << format_double(v.real()) << ','
           << format_double(v.imag()) << '\n';
    }
    os << "zero,0," << format_double(f.value_at_zero().real()) << ',' << format_double(f.value_at_zero().imag()) << '\n';
    if (f.tail()) {
        os << "tail," << format_double(f.tail()->coefficient.real()) << ',' << format_double(f.tail()->exponent) << '\n';
    }
    return os.str();
}

std::string matrix_csv(const Eigen::MatrixXd& A) {
    std::ostringstream os;
    os << "i,j,value\n";
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            os << i << ',' << j << ',' << format_double(A(i, j)) << '\n';
        }
    }
    return os.str();
}

namespace {

const json& require(const json& j, const char* key) {
    if (!j.contains(key)) {
        throw ConfigError(std::string("missing field '") + key + "'");
    }
    return j.at(key);
}

double number(const json& j, const char* key) {
    const json& v = require(j, key);
    if (!v.is_number()) {
        throw ConfigError(std::string("field '") + key + "' must be a number");
    }
    return v.get<double>();
}

std::int64_t integer(const json& j, const char* key) {
    const json& v = require(j, key);
    if (!v.is_number_integer()) {
        throw ConfigError(std::string("field '") + key + "' must be an integer");
    }
    return v.get<std::int64_t>();
}

template <class T>
T optional_value(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    if constexpr (std::is_integral_v<T>) {
        if (!j.at(key).is_number_integer()) {
            throw ConfigError(std::string("field '") + key + "' must be an integer");
        }
    } else {
        if (!j.at(key).is_number()) {
            throw ConfigError(std::string("field '") + key + "' must be a number");
        }
    }
    return j.at(key).get<T>();
}

} // namespace

EvolveConfig parse_evolve_config(const json& j, const fs::path& /*base_dir*/) {
    if (!j.is_object()) {
        throw ConfigError("configuration must be a JSON object");
    }
    static const std::vector<std::string> known = {"p", "alpha", "N", "M", "m", "tau", "t_end", "epsilon_schedule",
                                                   "newton_tol", "max_iters", "initial", "phi", "snapshot_every"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown field '" + key + "'");
        }
    }
    const std::int64_t p = integer(j, "p");
    if (!is_prime(p)) {
        throw ConfigError("field 'p' must be a prime (got " + std::to_string(p) + ")");
    }
    const double alpha = number(j, "alpha");
    if (!(alpha > 0.0)) {
        throw ConfigError("field 'alpha' must be positive");
    }
    const auto N = integer(j, "N");
    const auto M = integer(j, "M");
    const double m = number(j, "m");
    const double tau = number(j, "tau");
    const double t_end = number(j, "t_end");
    if (!(tau > 0.0)) {
        throw ConfigError("field 'tau' must be positive");
    }
    if (!(t_end >= 0.0)) {
        throw ConfigError("field 't_end' must be nonnegative");
    }
    SolverTolerances tol;
    tol.epsilon_levels = optional_value<int>(j, "epsilon_schedule", tol.epsilon_levels);
    tol.newton_tol = optional_value<double>(j, "newton_tol", tol.newton_tol);
    tol.max_iters = optional_value<int>(j, "max_iters", tol.max_iters);
    if (tol.epsilon_levels < 0 || tol.epsilon_levels > 60) {
        throw ConfigError("field 'epsilon_schedule' must be an integer level count in [0, 60]");
    }
    if (!(tol.newton_tol > 0.0) || tol.max_iters < 1) {
        throw ConfigError("fields 'newton_tol' and 'max_iters' must be positive");
    }

    PhiSpec phi = PhiSpec::power(1.0);
    try {
        if (j.contains("phi")) {
            const json& ph = j.at("phi");
            const std::string kind = require(ph, "kind").get<std::string>();
            if (kind == "power") {
                phi = PhiSpec::power(m);
            } else if (kind == "tabulated") {
                phi = PhiSpec::tabulated(require(ph, "u").get<std::vector<double>>(), require(ph, "v").get<std::vector<double>>());
            } else {
                throw ConfigError("phi.kind must be 'power' or 'tabulated'");
            }
        } else {
            phi = PhiSpec::power(m);
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("phi: ") + e.what());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("phi: ") + e.what());
    }

    std::optional<GridSpec> grid;
    try {
        grid.emplace(p, static_cast<int>(N), static_cast<int>(M));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("grid (p, N, M): ") + e.what());
    }

    const json& init = require(j, "initial");
    if (!init.is_object() || !init.contains("kind") || !init.at("kind").is_string()) {
        throw ConfigError("field 'initial' must be an object with a string 'kind'");
    }
    const std::string kind = init.at("kind").get<std::string>();
    if (kind != "indicator" && kind != "radial_power" && kind != "csv") {
        throw ConfigError("initial.kind must be indicator, radial_power or csv (got '" + kind + "')");
    }

    const auto every = optional_value<std::int64_t>(j, "snapshot_every", 1);
    if (every < 1) {
        throw ConfigError("field 'snapshot_every' must be positive");
    }
    EvolveConfig cfg{PMEProblem{p, alpha, *grid, phi, tau, t_end, tol}, InitialCondition{kind, init},
                     static_cast<std::size_t>(every), j};
    return cfg;
}

GridFunction build_initial(const EvolveConfig& cfg, const fs::path& base_dir) {
    const GridSpec& g = cfg.problem.grid;
    const json& s = cfg.initial.spec;
    try {
        if (cfg.initial.kind == "indicator") {
            const std::string center = s.value("center", std::string("0"));
            const auto radius = integer(s, "radius");
            const double value = optional_value<double>(s, "value", 1.0);
            const Ball b(PAdicExpansion::decode(g.p(), center), static_cast<int>(radius));
            return to_grid(TestFunction::indicator(b, value), g);
        }
        if (cfg.initial.kind == "radial_power") {
            const double beta = number(s, "beta");
            const double c = optional_value<double>(s, "coefficient", 1.0);
            if (!(beta > 0.0)) {
                throw ConfigError("initial.beta must be positive (the zero coset takes the value 0)");
            }
            GridFunction u(g);
            for (std::size_t i = 1; i < g.dim(); ++i) {
                u[i] = c * real_power(g.p(), beta * *g.abs_exp(i));
            }
            return u;
        }
        const std::string path = require(s, "path").get<std::string>();
        const fs::path full = fs::path(path).is_absolute() ? fs::path(path) : base_dir / path;
        return read_grid_function_csv(full, g);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("initial: ") + e.what());
    }
}

} // namespace padic::io
