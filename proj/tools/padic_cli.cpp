#include "padic/errors.hpp"
#include "padic/heat.hpp"
#include "padic/io.hpp"
#include "padic/pme_solver.hpp"
#include "padic/verify.hpp"
#include "padic/vladimirov.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace padic;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Collects artifacts for the manifest; every file goes through here.
class Outputs {
public:
    Outputs(std::string command, fs::path dir) : command_(std::move(command)), dir_(std::move(dir)) {}

    void write(const std::string& name, const std::string& content) {
        io::write_atomic(dir_ / name, content);
        files_.push_back(name);
    }
    void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

    void finish(const json& config, double seconds) {
        json m;
        m["command"] = command_;
        m["config"] = config;
        m["artifacts"] = files_;
        m["wall_clock_seconds"] = seconds;
        m["seed"] = nullptr;
        io::write_atomic(dir_ / "manifest.json", m.dump(2) + "\n");
    }

private:
    std::string command_;
    fs::path dir_;
    std::vector<std::string> files_;
};

void require_prime(std::int64_t p) {
    if (!is_prime(p)) {
        throw UsageError("--p must be a prime");
    }
}

// ---------------------------------------------------------------- kernel

struct KernelArgs {
    std::int64_t p = 2;
    double alpha = 2.0;
    std::optional<double> t;
    int shells = 20;
    std::optional<int> ball;
    std::optional<double> mu;
    std::string out = ".";
};

int cmd_kernel(const KernelArgs& a) {
    require_prime(a.p);
    if (!(a.alpha > 0.0)) {
        throw UsageError("--alpha must be positive");
    }
    if (a.shells < 1 || a.shells > 200) {
        throw UsageError("--shells must be in [1, 200]");
    }
    if (a.mu && a.ball) {
        throw UsageError("--mu and --ball select different kernels; give at most one");
    }
    if (a.mu && a.t) {
        throw UsageError("--t has no meaning for the Green kernel (--mu)");
    }
    if (!a.mu && !a.t) {
        throw UsageError("--t is required unless --mu is given");
    }
    if (a.t && !(*a.t > 0.0)) {
        throw UsageError("--t must be positive");
    }
    if (a.mu && !(a.alpha > 1.0)) {
        throw UsageError("the Green kernel E_mu needs alpha > 1");
    }
    if (a.mu && !(*a.mu > 0.0)) {
        throw UsageError("--mu must be positive");
    }

    const auto start = std::chrono::steady_clock::now();
    Outputs out("kernel", a.out);
    json config = {{"p", a.p}, {"alpha", a.alpha}, {"shells", a.shells}};
    json side;
    std::optional<RadialFunction> profile;

    if (a.mu) {
        config["mu"] = *a.mu;
        std::vector<Complex> vals;
        double bound = 0.0;
        for (int k = -a.shells; k <= a.shells; ++k) {
            const auto e = green_kernel_Emu(a.p, a.alpha, *a.mu, k);
            vals.emplace_back(e.value);
            bound = std::max(bound, e.truncation_bound);
        }
        const auto e0 = green_kernel_Emu(a.p, a.alpha, *a.mu, std::nullopt);
        bound = std::max(bound, e0.truncation_bound);
        profile.emplace(a.p, -a.shells, std::move(vals), Complex(e0.value));
        profile->truncation_bound = bound;
        side["kernel"] = "E_mu";
        side["truncation_bound"] = bound;
        // fitted, never hard-coded: E(p^k) p^{k(alpha+1)} on the outermost shell
        const double k = a.shells;
        side["tail_constant_estimate"] = profile->shell_value(a.shells).real() * real_power(a.p, k * (a.alpha + 1.0));
    } else {
        const KernelParams kp{a.p, a.alpha, *a.t};
        config["t"] = *a.t;
        if (a.ball) {
            const int N = *a.ball;
            config["ball"] = N;
            profile.emplace(ball_kernel_ZN(kp, N, N - a.shells));
            const auto mass = ball_kernel_mass(kp, N);
            const auto c = ball_constant_c(kp, N);
            side["kernel"] = "Z_N";
            side["truncation_bound"] = profile->truncation_bound;
            side["lambda"] = ball_kernel_lambda(kp, N);
            side["c"] = {{"value", c.value}, {"truncation_bound", c.truncation_bound},
                         {"from_mass_identity", ball_constant_c_from_mass(kp, N)}};
            side["mass"] = {{"value", mass.value}, {"truncation_bound", mass.truncation_bound}};
        } else {
            profile.emplace(heat_kernel_profile(kp, -a.shells, a.shells));
            const auto mass = heat_kernel_mass(kp, -a.shells, a.shells);
            side["kernel"] = "Z";
            side["truncation_bound"] = profile->truncation_bound;
            side["mass"] = {{"value", mass.value}, {"truncation_bound", mass.truncation_bound}};
            // the alternating series is only informative while its certificate is small
            json agree = json::array();
            double worst = 0.0;
            bool within = true;
            for (int k = -a.shells; k <= a.shells; ++k) {
                const auto z = kernel_Z(kp, k);
                KernelEvaluation w;
                try {
                    w = kernel_Z_alternating(kp, k);
                } catch (const PrecisionError&) {
                    continue;
                }
                if (!std::isfinite(w.value) || !(w.truncation_bound < 1e-6)) {
                    continue;
                }
                const double d = std::abs(z.value - w.value);
                worst = std::max(worst, d);
                within = within && d <= z.truncation_bound + w.truncation_bound + 1e-15;
                agree.push_back({{"k", k}, {"difference", d}, {"certificate", z.truncation_bound + w.truncation_bound}});
            }
            side["series_agreement"] = {{"shells", agree}, {"max_difference", worst}, {"within_certificates", within}};
        }
    }
    side["params"] = config;
    out.write("kernel.csv", io::radial_function_csv(*profile));
    out.write_json("kernel.json", side);
    out.finish(config, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    std::printf("kernel: wrote %s\n", (fs::path(a.out) / "kernel.csv").string().c_str());
    return kExitPass;
}

// ---------------------------------------------------------------- operator

struct GridArgs {
    std::int64_t p = 2;
    double alpha = 2.0;
    int N = 0;
    int M = 2;
    std::string out = ".";
};

GridSpec make_grid(const GridArgs& a) {
    require_prime(a.p);
    if (!(a.alpha > 0.0)) {
        throw UsageError("--alpha must be positive");
    }
    try {
        return GridSpec(a.p, a.N, a.M);
    } catch (const std::exception& e) {
        throw UsageError(std::string("grid: ") + e.what());
    }
}

int cmd_operator(const GridArgs& a) {
    const GridSpec g = make_grid(a);
    const auto start = std::chrono::steady_clock::now();
    const auto A = ball_matrix(OperatorParams{a.p, a.alpha, g});
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.entries, Eigen::EigenvaluesOnly);
    Outputs out("operator", a.out);
    const json config = {{"p", a.p}, {"alpha", a.alpha}, {"N", a.N}, {"M", a.M}};
    out.write("operator.csv", io::matrix_csv(A.entries));
    out.write_json("operator.json", {{"params", config},
                                     {"dim", g.dim()},
                                     {"lambda", A.lambda},
                                     {"min_eigenvalue", es.eigenvalues().minCoeff()},
                                     {"max_eigenvalue", es.eigenvalues().maxCoeff()}});
    out.finish(config, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    std::printf("operator: %zu x %zu matrix, lambda %.17g\n", g.dim(), g.dim(), A.lambda);
    return kExitPass;
}

// ---------------------------------------------------------------- evolve-heat

struct HeatArgs {
    GridArgs grid;
    double t_end = 1.0;
    int steps = 10;
    std::string center = "0";
    int radius = 0;
};

int cmd_evolve_heat(const HeatArgs& a) {
    const GridSpec g = make_grid(a.grid);
    if (!(a.t_end > 0.0) || a.steps < 1) {
        throw UsageError("--t-end must be positive and --steps at least 1");
    }
    GridFunction u0(g);
    try {
        u0 = to_grid(TestFunction::indicator(Ball(PAdicExpansion::decode(a.grid.p, a.center), a.radius)), g);
    } catch (const std::exception& e) {
        throw UsageError(std::string("initial indicator: ") + e.what());
    }
    const auto start = std::chrono::steady_clock::now();
    const auto A = ball_matrix(OperatorParams{a.grid.p, a.grid.alpha, g});
    const auto n = static_cast<Eigen::Index>(g.dim());
    Outputs out("evolve-heat", a.grid.out);
    json diag = json::array();
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i) = u0[static_cast<std::size_t>(i)].real();
    }
    out.write("heat_0000.csv", io::grid_function_csv(u0));
    for (int s = 1; s <= a.steps; ++s) {
        const double t = a.t_end * s / a.steps;
        const KernelParams kp{a.grid.p, a.grid.alpha, t};
        // u_t + A u = 0 on B_N: e^{-tA} = e^{-lambda t} T_N(t)
        GridFunction u = ball_semigroup_apply(kp, u0);
        u *= Complex(std::exp(-A.lambda * t));
        const Eigen::VectorXd y = expm(-t * A.entries) * x;
        double diff = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            diff = std::max(diff, std::abs(u[static_cast<std::size_t>(i)].real() - y(i)));
        }
        char name[32];
        std::snprintf(name, sizeof name, "heat_%04d.csv", s);
        out.write(name, io::grid_function_csv(u));
        const Norms nn = norms(u);
        diag.push_back({{"time", t}, {"file", name}, {"mass", integral(u).real()}, {"l1", nn.l1}, {"linf", nn.linf},
                        {"matrix_exponential_difference", diff}, {"c", ball_constant_c(kp, g.N()).value}});
    }
    const json config = {{"p", a.grid.p}, {"alpha", a.grid.alpha}, {"N", a.grid.N}, {"M", a.grid.M}, {"t_end", a.t_end},
                         {"steps", a.steps}, {"center", a.center}, {"radius", a.radius}};
    out.write_json("heat_diagnostics.json", {{"params", config}, {"lambda", A.lambda}, {"steps", diag}});
    out.finish(config, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    std::printf("evolve-heat: %d snapshots\n", a.steps + 1);
    return kExitPass;
}

// ---------------------------------------------------------------- evolve

int cmd_evolve(const std::string& config_path, const std::string& out_dir) {
    json j;
    {
        std::ifstream in(config_path);
        if (!in) {
            throw ConfigError("cannot read " + config_path);
        }
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("invalid JSON: ") + e.what());
        }
    }
    const fs::path base = fs::path(config_path).parent_path();
    const io::EvolveConfig cfg = io::parse_evolve_config(j, base);
    const GridFunction u0 = io::build_initial(cfg, base);

    const auto start = std::chrono::steady_clock::now();
    const PMESolver solver(cfg.problem);
    const auto result = solver.evolve(u0, cfg.snapshot_every);

    Outputs out("evolve", out_dir);
    json snaps = json::array();
    out.write("snapshot_0000.csv", io::grid_function_csv(u0));
    snaps.push_back({{"time", 0.0}, {"file", "snapshot_0000.csv"}});
    int idx = 1;
    for (const auto& [t, u] : result.snapshots) {
        if (t == 0.0) {
            continue;
        }
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%04d.csv", idx++);
        out.write(name, io::grid_function_csv(u));
        snaps.push_back({{"time", t}, {"file", name}});
    }
    json steps = json::array();
    for (const auto& d : result.diagnostics) {
        steps.push_back({{"time", d.time}, {"newton_iterations", d.newton_iterations}, {"residual", d.residual},
                         {"mass", d.mass}, {"l1", d.l1}, {"linf", d.linf}});
    }
    json diag = {{"config", cfg.raw}, {"snapshots", snaps}, {"steps", steps}};

    if (cfg.problem.phi.kind() == PhiSpec::Kind::Power && cfg.problem.phi.m() == 1.0 && !result.diagnostics.empty()) {
        // linear theory: the scheme is (I + tau A)^{-n} and tends to e^{-tA}
        const auto& A = solver.matrix().entries;
        const auto n = A.rows();
        const std::size_t steps_taken = result.diagnostics.size();
        const double t_end = result.diagnostics.back().time;
        const double tau_eff = t_end / static_cast<double>(steps_taken);
        Eigen::VectorXd x(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            x(i) = u0[static_cast<std::size_t>(i)].real();
        }
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd::Identity(n, n) + tau_eff * A);
        Eigen::VectorXd y = x;
        for (std::size_t s = 0; s < steps_taken; ++s) {
            y = lu.solve(y);
        }
        const Eigen::VectorXd z = expm(-t_end * A) * x;
        const GridFunction& last = result.snapshots.back().second;
        double d_scheme = 0.0;
        double d_exact = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            d_scheme = std::max(d_scheme, std::abs(last[static_cast<std::size_t>(i)].real() - y(i)));
            d_exact = std::max(d_exact, std::abs(last[static_cast<std::size_t>(i)].real() - z(i)));
        }
        diag["linear_reference"] = {{"time", t_end},
                                    {"tau", tau_eff},
                                    {"max_difference_to_linear_implicit_euler", d_scheme},
                                    {"max_difference_to_exp_minus_tA", d_exact}};
    }
    out.write_json("diagnostics.json", diag);
    out.finish(cfg.raw, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    std::printf("evolve: %zu steps, %zu snapshots\n", result.diagnostics.size(), snaps.size());
    return kExitPass;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const std::string& suite) {
    std::vector<int> ids;
    try {
        ids = verify::suite_criteria(suite);
    } catch (const PreconditionError&) {
        std::string names;
        for (const auto& s : verify::suite_names()) {
            names += (names.empty() ? "" : ", ") + s;
        }
        throw UsageError("unknown suite '" + suite + "' (expected one of " + names + ")");
    }
    std::vector<std::future<verify::CriterionReport>> jobs;
    for (int id : ids) {
        jobs.push_back(std::async(std::launch::async, verify::run_criterion, id));
    }
    bool all = true;
    std::vector<std::string> failed;
    for (auto& j : jobs) {
        const auto r = j.get();
        for (const auto& c : r.checks) {
            std::printf("%s [%d] %s: %s\n", c.passed ? "PASS" : "FAIL", r.id, c.name.c_str(), c.detail.c_str());
            if (!c.passed) {
                failed.push_back("[" + std::to_string(r.id) + "] " + c.name);
            }
        }
        all = all && r.passed();
    }
    if (!all) {
        std::printf("failed checks:\n");
        for (const auto& f : failed) {
            std::printf("  %s\n", f.c_str());
        }
    }
    std::printf("suite %s: %s\n", suite.c_str(), all ? "PASS" : "FAIL");
    return all ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------- explicit

struct ExplicitArgs {
    std::int64_t p = 2;
    double alpha = 2.0;
    double m = 2.0;
    double t0 = 1.0;
    double t = 0.5;
    int k_lo = -10;
    int k_hi = 10;
    bool companion = false;
    std::string out = ".";
};

int cmd_explicit(const ExplicitArgs& a) {
    require_prime(a.p);
    if (!(a.alpha > 0.0)) {
        throw UsageError("--alpha must be positive");
    }
    if (!(a.m > 1.0)) {
        throw UsageError("the explicit solution needs m > 1");
    }
    if (a.k_lo > a.k_hi) {
        throw UsageError("--k-lo must not exceed --k-hi");
    }
    if (!a.companion && !(a.t < a.t0)) {
        throw UsageError("the (t0 - t) solution needs t < t0");
    }
    if (!(a.t >= 0.0) || !(a.t0 > 0.0)) {
        throw UsageError("--t must be nonnegative and --t0 positive");
    }
    const auto start = std::chrono::steady_clock::now();
    const auto s = ExplicitSolution::make(a.p, a.alpha, a.m, a.t0, std::nullopt, a.companion);
    std::string csv = "k,shell_abs,value,time_derivative,operator_term,residual\n";
    for (int k = a.k_lo; k <= a.k_hi; ++k) {
        const long double du = s.time_derivative(a.t, k);
        const long double op = s.operator_term(a.t, k);
        csv += std::to_string(k) + "," + to_string(rational_power(a.p, k)) + "," + io::format_double(static_cast<double>(s.value(a.t, k)))
               + "," + io::format_double(static_cast<double>(du)) + "," + io::format_double(static_cast<double>(op)) + ","
               + io::format_double(static_cast<double>(std::fabs(du + op))) + "\n";
    }
    const auto res = residual_check_explicit(s, a.t, a.k_lo, a.k_hi);
    const json config = {{"p", a.p}, {"alpha", a.alpha}, {"m", a.m}, {"t0", a.t0}, {"t", a.t},
                         {"k_lo", a.k_lo}, {"k_hi", a.k_hi}, {"companion", a.companion}};
    Outputs out("explicit", a.out);
    out.write("explicit.csv", csv);
    out.write_json("explicit.json", {{"params", config},
                                     {"rho", static_cast<double>(s.rho)},
                                     {"rho_identity_defect", static_cast<double>(rho_identity_defect(a.p, a.alpha, a.m, s.rho))},
                                     {"max_residual", static_cast<double>(res.max_residual)},
                                     {"worst_shell", res.worst_shell}});
    out.finish(config, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    std::printf("explicit: rho %.17Lg, max residual %.3Lg\n", s.rho, static_cast<long double>(res.max_residual));
    return kExitPass;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-adic porous medium toolkit"};
    app.require_subcommand(1);

    KernelArgs ka;
    auto* kernel = app.add_subcommand("kernel", "tabulate Z, Z_N (--ball) or E_mu (--mu) on shells");
    kernel->add_option("--p", ka.p, "prime")->capture_default_str();
    kernel->add_option("--alpha", ka.alpha, "order of the operator")->capture_default_str();
    kernel->add_option("--t", ka.t, "time");
    kernel->add_option("--shells", ka.shells, "shells -S..S (Z, E_mu) or N-S..N (Z_N)")->capture_default_str();
    kernel->add_option("--ball", ka.ball, "restrict to B_N");
    kernel->add_option("--mu", ka.mu, "Green kernel parameter");
    kernel->add_option("--out", ka.out, "output directory")->capture_default_str();

    GridArgs ga;
    auto* op = app.add_subcommand("operator", "dump the ball matrix");
    op->add_option("--p", ga.p)->capture_default_str();
    op->add_option("--alpha", ga.alpha)->capture_default_str();
    op->add_option("--N", ga.N, "ball radius exponent")->capture_default_str();
    op->add_option("--M", ga.M, "resolution exponent")->capture_default_str();
    op->add_option("--out", ga.out)->capture_default_str();

    HeatArgs ha;
    auto* heat = app.add_subcommand("evolve-heat", "linear evolution e^{-tA} of an indicator on B_N");
    heat->add_option("--p", ha.grid.p)->capture_default_str();
    heat->add_option("--alpha", ha.grid.alpha)->capture_default_str();
    heat->add_option("--N", ha.grid.N)->capture_default_str();
    heat->add_option("--M", ha.grid.M)->capture_default_str();
    heat->add_option("--t-end", ha.t_end)->capture_default_str();
    heat->add_option("--steps", ha.steps)->capture_default_str();
    heat->add_option("--center", ha.center, "expansion encoding, e.g. \"-1:1\"")->capture_default_str();
    heat->add_option("--radius", ha.radius)->capture_default_str();
    heat->add_option("--out", ha.grid.out)->capture_default_str();

    std::string config_path;
    std::string evolve_out = ".";
    auto* evolve = app.add_subcommand("evolve", "porous medium evolution from a JSON configuration");
    evolve->add_option("--config", config_path)->required();
    evolve->add_option("--out", evolve_out)->capture_default_str();

    std::string suite;
    auto* ver = app.add_subcommand("verify", "run an acceptance suite");
    ver->add_option("suite", suite, "operator, kernel, semigroup, solver, explicit or all")->required();

    ExplicitArgs ea;
    auto* ex = app.add_subcommand("explicit", "tabulate the explicit radial solution and its residual");
    ex->add_option("--p", ea.p)->capture_default_str();
    ex->add_option("--alpha", ea.alpha)->capture_default_str();
    ex->add_option("--m", ea.m)->capture_default_str();
    ex->add_option("--t0", ea.t0)->capture_default_str();
    ex->add_option("--t", ea.t)->capture_default_str();
    ex->add_option("--k-lo", ea.k_lo)->capture_default_str();
    ex->add_option("--k-hi", ea.k_hi)->capture_default_str();
    ex->add_flag("--companion", ea.companion, "use the (t0 + t) solution");
    ex->add_option("--out", ea.out)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*kernel) {
            return cmd_kernel(ka);
        }
        if (*op) {
            return cmd_operator(ga);
        }
        if (*heat) {
            return cmd_evolve_heat(ha);
        }
        if (*evolve) {
            return cmd_evolve(config_path, evolve_out);
        }
        if (*ver) {
            return cmd_verify(suite);
        }
        if (*ex) {
            return cmd_explicit(ea);
        }
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFail;
    }
    return kExitUsage;
}
