#include "padic/pme_solver.hpp"

#include "padic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace padic {

// ---------------------------------------------------------------- PhiSpec

PhiSpec PhiSpec::power(double m) {
    if (!(m >= 1.0)) {
        throw DomainError("power nonlinearity needs m >= 1 (got " + std::to_string(m) + ")");
    }
    PhiSpec s;
    s.kind_ = Kind::Power;
    s.m_ = m;
    return s;
}

PhiSpec PhiSpec::tabulated(std::vector<double> u, std::vector<double> v) {
    if (u.size() != v.size() || u.size() < 2) {
        throw DomainError("a phi table needs at least two (u, v) pairs of equal length");
    }
    bool origin = false;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (i > 0 && !(u[i] > u[i - 1] && v[i] > v[i - 1])) {
            throw DomainError("phi table must be strictly increasing in both columns (row " + std::to_string(i) + ")");
        }
        if (u[i] == 0.0) {
            if (v[i] != 0.0) {
                throw DomainError("phi table must pass through the origin");
            }
            origin = true;
        }
    }
    if (!origin) {
        throw DomainError("phi table must contain the point (0, 0)");
    }
    PhiSpec s;
    s.kind_ = Kind::Tabulated;
    s.u_ = std::move(u);
    s.v_ = std::move(v);
    return s;
}

namespace {

// segment index i with x in [xs[i], xs[i+1]), clamped to the end segments
std::size_t segment(const std::vector<double>& xs, double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = static_cast<std::size_t>(std::distance(xs.begin(), it));
    if (i == 0) {
        return 0;
    }
    return std::min(i - 1, xs.size() - 2);
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    const std::size_t i = segment(xs, x);
    const double slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    return ys[i] + slope * (x - xs[i]);
}

double sgn_pow(double x, double e) {
    return std::copysign(std::pow(std::abs(x), e), x);
}

} // namespace

double PhiSpec::phi(double u) const {
    if (kind_ == Kind::Power) {
        return m_ == 1.0 ? u : sgn_pow(u, m_);
    }
    return interpolate(u_, v_, u);
}

double PhiSpec::beta(double v) const {
    if (!std::isfinite(v)) {
        throw DomainError("beta evaluated at a non-finite value");
    }
    if (kind_ == Kind::Power) {
        return m_ == 1.0 ? v : sgn_pow(v, 1.0 / m_);
    }
    return interpolate(v_, u_, v);
}

double PhiSpec::dphi(double u) const {
    if (kind_ == Kind::Power) {
        return m_ == 1.0 ? 1.0 : m_ * std::pow(std::abs(u), m_ - 1.0);
    }
    const std::size_t i = segment(u_, u);
    return (v_[i + 1] - v_[i]) / (u_[i + 1] - u_[i]);
}

// ---------------------------------------------------------------- problem

void PMEProblem::validate() const {
    require_prime(p);
    if (grid.p() != p) {
        throw PreconditionError("grid prime differs from problem prime");
    }
    if (!(alpha > 0.0)) {
        throw DomainError("alpha must be positive");
    }
    if (!(tau > 0.0)) {
        throw PreconditionError("tau must be positive");
    }
    if (!(t_end >= 0.0)) {
        throw PreconditionError("t_end must be nonnegative");
    }
    if (!(tol.newton_tol > 0.0) || tol.max_iters < 1 || tol.epsilon_levels < 0) {
        throw PreconditionError("invalid solver tolerances");
    }
}

PMESolver::PMESolver(PMEProblem problem)
    : problem_(std::move(problem)),
      A_((problem_.validate(), ball_matrix(OperatorParams{problem_.p, problem_.alpha, problem_.grid}))) {}

namespace {

Eigen::VectorXd to_vector(const GridFunction& f) {
    const auto re = f.real_values(1e-12 * std::max(1.0, norms(f).linf));
    return Eigen::Map<const Eigen::VectorXd>(re.data(), static_cast<Eigen::Index>(re.size()));
}

GridFunction from_vector(const GridSpec& g, const Eigen::VectorXd& x) {
    return GridFunction::from_real(g, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

} // namespace

std::optional<StationaryResult> PMESolver::newton(const Eigen::VectorXd& f, double epsilon, double scale,
                                                  Eigen::VectorXd u) const {
    const PhiSpec& phi = problem_.phi;
    const auto n = f.size();
    const Eigen::MatrixXd B = scale * A_.entries + epsilon * Eigen::MatrixXd::Identity(n, n);
    const double tol = problem_.tol.newton_tol * std::max(1.0, f.cwiseAbs().maxCoeff());

    auto phi_of = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd y(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            y(i) = phi.phi(x(i));
        }
        return y;
    };
    auto G = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x + B * phi_of(x) - f; };

    Eigen::VectorXd g = G(u);
    int it = 0;
    bool polished = false;
    while (true) {
        const double res = g.cwiseAbs().maxCoeff();
        if (!std::isfinite(res)) {
            return std::nullopt;
        }
        if (res <= tol && polished) {
            break;
        }
        if (it >= problem_.tol.max_iters) {
            if (res <= tol) {
                break;
            }
            return std::nullopt;
        }
        Eigen::VectorXd d(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            d(i) = phi.dphi(u(i));
        }
        Eigen::MatrixXd J = B * d.asDiagonal();
        J.diagonal().array() += 1.0;
        const Eigen::VectorXd step = J.partialPivLu().solve(-g);
        double theta = 1.0;
        const double merit = g.norm();
        bool accepted = false;
        for (int h = 0; h < 40; ++h) {
            const Eigen::VectorXd trial = u + theta * step;
            const Eigen::VectorXd gt = G(trial);
            if (gt.norm() < merit || (res <= tol && gt.norm() <= merit)) {
                u = trial;
                g = gt;
                accepted = true;
                break;
            }
            theta *= 0.5;
        }
        ++it;
        if (!accepted) {
            if (res <= tol) {
                break;  // already at round-off
            }
            return std::nullopt;
        }
        if (res <= tol) {
            polished = true;
        }
    }

    const GridSpec& grid = problem_.grid;
    const Eigen::VectorXd v = phi_of(u);
    Eigen::VectorXd bv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        bv(i) = phi.beta(v(i));
    }
    const Eigen::VectorXd w = f - scale * (A_.entries * v);
    const double residual = (epsilon * v + scale * (A_.entries * v) + bv - f).cwiseAbs().maxCoeff();
    return StationaryResult{from_vector(grid, v), from_vector(grid, w), from_vector(grid, u), it, residual};
}

StationaryResult PMESolver::stationary_solve(const GridFunction& f, double epsilon, double scale) const {
    if (!(f.grid() == problem_.grid)) {
        throw PreconditionError("right-hand side lives on a different grid");
    }
    if (!(epsilon >= 0.0) || !(scale > 0.0)) {
        throw PreconditionError("stationary solve needs epsilon >= 0 and scale > 0");
    }
    const Eigen::VectorXd fv = to_vector(f);
    if (!fv.allFinite()) {
        throw DomainError("right-hand side has non-finite values");
    }
    if (auto r = newton(fv, epsilon, scale, fv)) {
        return *r;
    }
    // continuation in eps from 1 down to the target
    Eigen::VectorXd u = fv;
    int total = 0;
    double last = 0.0;
    for (int j = 0; j <= problem_.tol.epsilon_levels; ++j) {
        const double e = std::ldexp(1.0, -j);
        if (e <= epsilon) {
            break;
        }
        auto r = newton(fv, e, scale, u);
        if (!r) {
            throw SolverError("Newton failed on the continuation level eps = " + std::to_string(e), last, total);
        }
        u = to_vector(r->beta_v);
        total += r->iterations;
        last = r->residual;
    }
    auto r = newton(fv, epsilon, scale, u);
    if (!r) {
        throw SolverError("Newton failed at eps = " + std::to_string(epsilon) + " after continuation", last, total);
    }
    r->iterations += total;
    return *r;
}

GridFunction PMESolver::implicit_step(const GridFunction& u, StepDiagnostics* diag) const {
    const auto r = stationary_solve(u, 0.0, problem_.tau);
    if (diag) {
        diag->newton_iterations = r.iterations;
        diag->residual = r.residual;
    }
    return r.beta_v;
}

GridFunction PMESolver::forward_map(const GridFunction& u, double scale) const {
    const Eigen::VectorXd x = to_vector(u);
    Eigen::VectorXd v(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        v(i) = problem_.phi.phi(x(i));
    }
    return from_vector(problem_.grid, x + scale * (A_.entries * v));
}

namespace {

int step_count(double t_end, double tau) {
    const double n = std::ceil(t_end / tau - 1e-9);
    if (n > 1e7) {
        throw ResourceError("too many time steps requested");
    }
    return static_cast<int>(n);
}

} // namespace

EvolutionResult PMESolver::evolve(const GridFunction& u0, std::size_t snapshot_every) const {
    if (snapshot_every == 0) {
        throw PreconditionError("snapshot_every must be positive");
    }
    const int n = step_count(problem_.t_end, problem_.tau);
    EvolutionResult out;
    out.snapshots.emplace_back(0.0, u0);
    if (n == 0) {
        return out;
    }
    // uniform steps that land exactly on t_end
    PMEProblem stepped = problem_;
    stepped.tau = problem_.t_end / n;
    const PMESolver uniform(stepped);
    GridFunction u = u0;
    for (int k = 1; k <= n; ++k) {
        StepDiagnostics d;
        u = uniform.implicit_step(u, &d);
        d.time = stepped.tau * k;
        const Norms nu = norms(u);
        d.mass = integral(u).real();
        d.l1 = nu.l1;
        d.linf = nu.linf;
        out.diagnostics.push_back(d);
        if (k % static_cast<int>(snapshot_every) == 0 || k == n) {
            out.snapshots.emplace_back(d.time, u);
        }
    }
    return out;
}

RefinementReport PMESolver::refinement_ladder(const GridFunction& u0, int halvings) const {
    if (halvings < 1) {
        throw PreconditionError("refinement needs at least one halving");
    }
    RefinementReport rep;
    std::vector<EvolutionResult> runs;
    for (int i = 0; i <= halvings + 1; ++i) {
        PMEProblem q = problem_;
        q.tau = problem_.tau / std::ldexp(1.0, i);
        rep.taus.push_back(q.tau);
        runs.push_back(PMESolver(q).evolve(u0, std::size_t{1} << i));
    }
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
        const auto& a = runs[i].snapshots;
        const auto& b = runs[i + 1].snapshots;
        double d = 0.0;
        for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
            d = std::max(d, norms(a[k].second - b[k].second).l1);
        }
        rep.differences.push_back(d);
    }
    for (std::size_t i = 0; i + 1 < rep.differences.size(); ++i) {
        rep.orders.push_back(std::log2(rep.differences[i] / rep.differences[i + 1]));
    }
    return rep;
}

// ---------------------------------------------------------------- explicit solution

long double rho_formula(std::int64_t p, double alpha, double m) {
    if (!(m > 1.0)) {
        throw DomainError("the explicit solution needs m > 1 (got " + std::to_string(m) + ")");
    }
    if (!(alpha > 0.0)) {
        throw DomainError("alpha must be positive");
    }
    const long double nu = 1.0L / (m - 1.0L);
    const long double ratio = gamma_p_extended(p, 1.0L + alpha * nu)
                            / ((m - 1.0L) * gamma_p_extended(p, 1.0L + alpha * m * nu));
    if (!(ratio > 0.0L)) {
        throw DomainError("Gamma_p ratio is not positive; no real rho");
    }
    return -std::pow(ratio, nu);
}

long double rho_identity_defect(std::int64_t p, double alpha, double m, long double rho) {
    const long double nu = 1.0L / (m - 1.0L);
    return rho * nu + std::pow(std::fabs(rho), static_cast<long double>(m))
                          * gamma_p_extended(p, alpha * m * nu + 1.0L) / gamma_p_extended(p, alpha * nu + 1.0L);
}

ExplicitSolution ExplicitSolution::make(std::int64_t p, double alpha, double m, double t0,
                                        std::optional<long double> rho_override, bool companion) {
    require_prime(p);
    if (!(t0 > 0.0)) {
        throw DomainError("t0 must be positive");
    }
    const long double rho = rho_override ? *rho_override : rho_formula(p, alpha, m);
    if (!(m > 1.0)) {
        throw DomainError("the explicit solution needs m > 1");
    }
    return ExplicitSolution{p, alpha, m, t0, rho, companion};
}

namespace {

long double shift_time(const ExplicitSolution& s, double t) {
    if (s.companion) {
        if (!(t >= 0.0)) {
            throw DomainError("the companion solution is defined for t >= 0");
        }
        return static_cast<long double>(s.t0) + t;
    }
    if (!(t < s.t0)) {
        throw DomainError("the explicit solution needs t < t0");
    }
    return static_cast<long double>(s.t0) - t;
}

} // namespace

long double ExplicitSolution::value(double t, int k) const {
    const long double nu = 1.0L / (m - 1.0L);
    const long double T = shift_time(*this, t);
    return amplitude() * std::pow(T, -nu) * std::pow(static_cast<long double>(p), k * alpha * nu);
}

long double ExplicitSolution::time_derivative(double t, int k) const {
    const long double nu = 1.0L / (m - 1.0L);
    const long double T = shift_time(*this, t);
    const long double sign = companion ? -1.0L : 1.0L;
    return sign * nu * amplitude() * std::pow(T, -nu - 1.0L) * std::pow(static_cast<long double>(p), k * alpha * nu);
}

long double ExplicitSolution::operator_term(double t, int k) const {
    const long double nu = 1.0L / (m - 1.0L);
    const long double T = shift_time(*this, t);
    const long double beta = alpha * m * nu;
    const long double C = radial_power_coefficient(OperatorParams{p, alpha, std::nullopt}, beta);
    return std::pow(std::fabs(amplitude()), static_cast<long double>(m)) * std::pow(T, -nu * m) * C
         * std::pow(static_cast<long double>(p), k * (beta - alpha));
}

ResidualReport residual_check_explicit(const ExplicitSolution& s, double t, int k_lo, int k_hi) {
    ResidualReport r;
    for (int k = k_lo; k <= k_hi; ++k) {
        const double res = static_cast<double>(std::fabs(s.time_derivative(t, k) + s.operator_term(t, k)));
        if (res > r.max_residual || k == k_lo) {
            r.max_residual = res;
            r.worst_shell = k;
        }
    }
    return r;
}

} // namespace padic
