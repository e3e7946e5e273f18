#pragma once

#include "padic/function_space.hpp"
#include "padic/vladimirov.hpp"

#include <Eigen/Dense>

#include <optional>
#include <utility>
#include <vector>

namespace padic {

/// Strictly increasing phi with phi(0) = 0: either u |u|^{m-1} or a
/// piecewise-linear table through the origin (extended linearly at the ends).
class PhiSpec {
public:
    enum class Kind { Power, Tabulated };

    static PhiSpec power(double m);
    static PhiSpec tabulated(std::vector<double> u, std::vector<double> v);

    Kind kind() const noexcept { return kind_; }
    double m() const noexcept { return m_; }

    double phi(double u) const;
    /// phi^{-1}
    double beta(double v) const;
    /// phi'(u); for a table, the slope of the segment containing u.
    double dphi(double u) const;

private:
    Kind kind_ = Kind::Power;
    double m_ = 1.0;
    std::vector<double> u_;
    std::vector<double> v_;
};

struct SolverTolerances {
    double newton_tol = 1e-12;
    int max_iters = 200;
    /// continuation levels eps_j = 2^{-j}, j = 0..epsilon_levels
    int epsilon_levels = 20;
};

struct PMEProblem {
    std::int64_t p;
    double alpha;
    GridSpec grid;
    PhiSpec phi;
    double tau;
    double t_end;
    SolverTolerances tol;

    void validate() const;
};

struct StationaryResult {
    GridFunction v;
    GridFunction w;       // f - scale * A v
    GridFunction beta_v;  // the Newton variable u = beta(v)
    int iterations = 0;
    double residual = 0.0;
};

struct StepDiagnostics {
    double time = 0.0;
    int newton_iterations = 0;
    double residual = 0.0;
    double mass = 0.0;
    double l1 = 0.0;
    double linf = 0.0;
};

struct EvolutionResult {
    std::vector<std::pair<double, GridFunction>> snapshots;
    std::vector<StepDiagnostics> diagnostics;
};

struct RefinementReport {
    std::vector<double> taus;
    /// max_t ||u_tau(t) - u_{tau/2}(t)||_1 for consecutive taus
    std::vector<double> differences;
    /// log2 of consecutive difference ratios
    std::vector<double> orders;
};

class PMESolver {
public:
    explicit PMESolver(PMEProblem problem);

    const PMEProblem& problem() const noexcept { return problem_; }
    const BallOperatorMatrix& matrix() const noexcept { return A_; }

    /// Solves eps v + scale A v + beta(v) = f (real f). Newton runs in the
    /// variable u = beta(v); on failure the eps-continuation schedule is used.
    StationaryResult stationary_solve(const GridFunction& f, double epsilon, double scale = 1.0) const;

    /// u+ with u+ + tau A phi(u+) = u.
    GridFunction implicit_step(const GridFunction& u, StepDiagnostics* diag = nullptr) const;

    /// u + scale A phi(u).
    GridFunction forward_map(const GridFunction& u, double scale = 1.0) const;

    /// Implicit Euler from 0 to t_end; every `snapshot_every` steps and the final
    /// step are kept.
    EvolutionResult evolve(const GridFunction& u0, std::size_t snapshot_every = 1) const;

    /// Runs tau, tau/2, ..., tau/2^{halvings+1} and compares at the coarse times.
    RefinementReport refinement_ladder(const GridFunction& u0, int halvings = 3) const;

private:
    PMEProblem problem_;
    BallOperatorMatrix A_;

    std::optional<StationaryResult> newton(const Eigen::VectorXd& f, double epsilon, double scale,
                                           Eigen::VectorXd u) const;
};

// ---------------------------------------------------------------- explicit solution

/// rho = -[Gamma_p(1 + a/(m-1)) / ((m-1) Gamma_p(1 + a m/(m-1)))]^{1/(m-1)}.
long double rho_formula(std::int64_t p, double alpha, double m);

/// rho/(m-1) + |rho|^m Gamma_p(a m/(m-1) + 1) / Gamma_p(a/(m-1) + 1); zero for the true rho.
long double rho_identity_defect(std::int64_t p, double alpha, double m, long double rho);

/// u(t,x) = rho (t0 - t)^{-1/(m-1)} |x|^{alpha/(m-1)}, or with `companion`
/// mu (t0 + t)^{-1/(m-1)} |x|^{alpha/(m-1)} with mu = -rho.
struct ExplicitSolution {
    std::int64_t p;
    double alpha;
    double m;
    double t0;
    long double rho;
    bool companion = false;

    static ExplicitSolution make(std::int64_t p, double alpha, double m, double t0,
                                 std::optional<long double> rho_override = std::nullopt, bool companion = false);

    long double amplitude() const { return companion ? -rho : rho; }
    double time_exponent() const { return -1.0 / (m - 1.0); }
    double space_exponent() const { return alpha / (m - 1.0); }

    /// value on the shell |x|_p = p^k at time t
    long double value(double t, int k) const;
    long double time_derivative(double t, int k) const;
    /// D^alpha(|u|^m) on the shell, from the radial power rule
    long double operator_term(double t, int k) const;
};

struct ResidualReport {
    double max_residual = 0.0;
    int worst_shell = 0;
};

/// max over k in [k_lo, k_hi] of |du/dt + D^alpha(|u|^m)|.
ResidualReport residual_check_explicit(const ExplicitSolution& s, double t, int k_lo, int k_hi);

} // namespace padic
