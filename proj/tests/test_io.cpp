#include <doctest.h>

#include "padic/errors.hpp"
#include "padic/io.hpp"

#include <fstream>

using namespace padic;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    const fs::path d = fs::temp_directory_path() / "padic_io_test";
    fs::create_directories(d);
    return d;
}

nlohmann::json base_config() {
    return nlohmann::json::parse(R"({"p":2,"alpha":2,"N":1,"M":2,"m":2,"tau":0.1,"t_end":0.5,
                                     "initial":{"kind":"indicator","radius":-1}})");
}

} // namespace

TEST_CASE("grid CSV round trip") {
    const GridSpec g(3, 1, 1);
    GridFunction u(g);
    for (std::size_t i = 0; i < g.dim(); ++i) {
        u[i] = Complex(0.1 * static_cast<double>(i), -1.0 / 3.0);
    }
    const fs::path f = scratch_dir() / "u.csv";
    io::write_atomic(f, io::grid_function_csv(u));
    const auto back = io::read_grid_function_csv(f, g);
    for (std::size_t i = 0; i < g.dim(); ++i) {
        CHECK(back[i] == u[i]);
    }
    CHECK_THROWS_AS(io::read_grid_function_csv(f, GridSpec(3, 1, 2)), ConfigError);
    CHECK(io::grid_function_csv(u).substr(0, 22) == "index,center,abs,re,im");
}

TEST_CASE("radial and matrix CSV") {
    const RadialFunction r(2, 1, {Complex(0.5), Complex(0.25)}, Complex(1.0), PowerTail{2.0, -3.0});
    CHECK(io::radial_function_csv(r) == "k,shell_abs,re,im\n1,2,0.5,0\n2,4,0.25,0\nzero,0,1,0\ntail,2,-3\n");
    Eigen::MatrixXd A(1, 2);
    A << 1.0, -0.5;
    CHECK(io::matrix_csv(A) == "i,j,value\n0,0,1\n0,1,-0.5\n");
}

TEST_CASE("evolve configuration") {
    const auto cfg = io::parse_evolve_config(base_config());
    CHECK(cfg.problem.grid == GridSpec(2, 1, 2));
    CHECK(cfg.problem.phi.m() == 2.0);
    const auto u0 = io::build_initial(cfg);
    CHECK(integral(u0).real() == doctest::Approx(0.5));

    auto j = base_config();
    j["extra"] = 1;
    CHECK_THROWS_AS(io::parse_evolve_config(j), ConfigError);
    j = base_config();
    j.erase("tau");
    CHECK_THROWS_AS(io::parse_evolve_config(j), ConfigError);
    j = base_config();
    j["p"] = 6;
    CHECK_THROWS_AS(io::parse_evolve_config(j), ConfigError);
    j = base_config();
    j["initial"] = {{"kind", "gaussian"}};
    CHECK_THROWS_AS(io::parse_evolve_config(j), ConfigError);
    j = base_config();
    j["epsilon_schedule"] = -1;
    CHECK_THROWS_AS(io::parse_evolve_config(j), ConfigError);

    j = base_config();
    j["initial"] = {{"kind", "radial_power"}, {"beta", 1.0}};
    const auto rp = io::build_initial(io::parse_evolve_config(j));
    CHECK(rp[0] == Complex(0.0));
    CHECK(rp[1].real() == doctest::Approx(2.0));

    j = base_config();
    j["phi"] = {{"kind", "tabulated"}, {"u", {-1.0, 0.0, 1.0}}, {"v", {-1.0, 0.0, 2.0}}};
    CHECK(io::parse_evolve_config(j).problem.phi.kind() == PhiSpec::Kind::Tabulated);
}
