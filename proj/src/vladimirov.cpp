#include "padic/vladimirov.hpp"

#include "padic/errors.hpp"

#include <cmath>
#include <string>

namespace padic {

const GridSpec& OperatorParams::require_grid() const {
    if (!grid) {
        throw PreconditionError("operator parameters carry no grid");
    }
    return *grid;
}

namespace {

void require_positive_alpha(double alpha) {
    if (!(alpha > 0.0)) {
        throw DomainError("alpha must be positive (got " + std::to_string(alpha) + ")");
    }
}

} // namespace

double hypersingular_constant(std::int64_t p, double alpha) {
    return (1.0 - real_power(p, alpha)) / (1.0 - real_power(p, -alpha - 1.0));
}

double ball_lambda(std::int64_t p, double alpha, int N) {
    const double pd = static_cast<double>(p);
    return (pd - 1.0) / (real_power(p, alpha + 1.0) - 1.0) * real_power(p, alpha * (1.0 - N));
}

double indicator_inside_value(std::int64_t p, double alpha, int l) {
    const double pd = static_cast<double>(p);
    return real_power(p, l) * (1.0 - 1.0 / pd) / (1.0 - real_power(p, -alpha - 1.0)) * real_power(p, -l * (alpha + 1.0));
}

RadialFunction apply_to_indicator(const OperatorParams& params, const Ball& b) {
    require_positive_alpha(params.alpha);
    const std::int64_t p = params.p;
    const int l = b.radius_exp();
    const double inside = indicator_inside_value(p, params.alpha, l);
    const double c = real_power(p, l) * gamma_p(p, params.alpha + 1.0);
    // Shells start above the ball; everything at |y - x0| <= p^l is `inside`.
    return RadialFunction(p, l + 1, {}, inside, PowerTail{c, -params.alpha - 1.0});
}

Complex apply_to_test_function(const OperatorParams& params, const TestFunction& f, const PAdicExpansion& y) {
    require_positive_alpha(params.alpha);
    const std::int64_t p = params.p;
    const double g = gamma_p(p, params.alpha + 1.0);
    Complex s{};
    for (const auto& t : f.terms()) {
        const int l = t.ball.radius_exp();
        if (t.ball.contains(y)) {
            s += t.coefficient * indicator_inside_value(p, params.alpha, l);
        } else {
            const int k = -*difference_valuation(y, t.ball.center());
            s += t.coefficient * real_power(p, l) * g * real_power(p, -k * (params.alpha + 1.0));
        }
    }
    return s;
}

RadialPowerImage apply_radial_power(const OperatorParams& params, double beta) {
    return {static_cast<double>(radial_power_coefficient(params, beta)), beta - params.alpha};
}

long double radial_power_coefficient(const OperatorParams& params, long double beta) {
    require_positive_alpha(params.alpha);
    if (std::fabs(beta - params.alpha) < 1e-12L) {
        throw DomainError("D^alpha |x|^beta is excluded at beta = alpha = " + std::to_string(static_cast<double>(beta)));
    }
    long double num = 0.0L;
    long double den = 0.0L;
    try {
        num = gamma_p_extended(params.p, beta + 1.0L);
    } catch (const DomainError&) {
        throw DomainError("Gamma_p(beta + 1) has a pole at beta = " + std::to_string(static_cast<double>(beta)));
    }
    try {
        den = gamma_p_extended(params.p, beta - params.alpha + 1.0L);
    } catch (const DomainError&) {
        throw DomainError("Gamma_p(beta - alpha + 1) has a pole at beta = " + std::to_string(static_cast<double>(beta)));
    }
    return num / den;
}

QuadratureResult hypersingular_quadrature(const OperatorParams& params, const TestFunction& f,
                                          const PAdicExpansion& x, int k_hi, std::optional<int> k_lo) {
    require_positive_alpha(params.alpha);
    const std::int64_t p = params.p;
    const double alpha = params.alpha;
    const TestFunction g = canonicalize(f);
    const Complex fx = g(x);
    QuadratureResult r{Complex{}, 0.0, 0};

    const double sup = norms(g).linf;
    const double pd = static_cast<double>(p);
    r.tail_bound = 2.0 * sup * std::abs(1.0 - real_power(p, alpha)) / (1.0 - real_power(p, -alpha - 1.0))
                 * (1.0 - 1.0 / pd) * real_power(p, -(k_hi + 1) * alpha) / (1.0 - real_power(p, -alpha));
    if (g.empty()) {
        return r;
    }
    const int rho = *g.min_radius_exp();
    const int lo = k_lo.value_or(rho + 1);

    for (int k = lo; k <= k_hi; ++k) {
        ++r.shells_used;
        if (k <= rho) {
            continue;  // f(x - y) = f(x) on the whole shell
        }
        // Each term is constant on the shell unless |x - x0| = p^k > p^l.
        Complex constant_part{};
        bool varying = false;
        for (const auto& t : g.terms()) {
            const int l = t.ball.radius_exp();
            const auto v = difference_valuation(x, t.ball.center());
            if (v && -*v == k && k > l) {
                varying = true;
                break;
            }
            const bool in = (!v || -*v < k) ? k <= l : -*v <= l;
            if (in) {
                constant_part += t.coefficient;
            }
        }
        Complex shell_integral;
        if (!varying) {
            shell_integral = (constant_part - fx) * shell_volume(p, k);
        } else {
            const double count = std::pow(pd, k - rho);
            if (count > static_cast<double>(1 << 22)) {
                throw ResourceError("quadrature shell " + std::to_string(k) + " needs too many cosets");
            }
            const double cell = real_power(p, rho);
            const auto n = static_cast<std::uint64_t>(count);
            for (std::uint64_t i = 0; i < n; ++i) {
                if (i % static_cast<std::uint64_t>(p) == 0) {
                    continue;  // |y| < p^k
                }
                const PAdicExpansion y = PAdicExpansion::from_scaled_integer(p, i, -k);
                Complex fxy{};
                for (const auto& t : g.terms()) {
                    // x - y in B(x0, l)  <=>  y + x0 in B(x, l)
                    if (Ball(x, t.ball.radius_exp()).contains(y + t.ball.center())) {
                        fxy += t.coefficient;
                    }
                }
                shell_integral += cell * (fxy - fx);
            }
        }
        r.value += real_power(p, -k * (alpha + 1.0)) * shell_integral;
    }
    r.value *= hypersingular_constant(p, alpha);
    return r;
}

double ball_kernel_entry(std::int64_t p, double alpha, int M, std::optional<int> distance_exp) {
    const double cell = real_power(p, -M);
    if (!distance_exp) {
        return indicator_inside_value(p, alpha, -M);
    }
    return cell * gamma_p(p, alpha + 1.0) * real_power(p, -*distance_exp * (alpha + 1.0));
}

BallOperatorMatrix ball_matrix(const OperatorParams& params) {
    require_positive_alpha(params.alpha);
    const GridSpec& g = params.require_grid();
    const std::size_t n = g.dim();
    // one kernel value per possible distance exponent -M+1 .. N
    std::vector<double> by_distance(static_cast<std::size_t>(g.N() + g.M()));
    for (int k = -g.M() + 1; k <= g.N(); ++k) {
        by_distance[static_cast<std::size_t>(k + g.M() - 1)] = ball_kernel_entry(params.p, params.alpha, g.M(), k);
    }
    const double diag = ball_kernel_entry(params.p, params.alpha, g.M(), std::nullopt);
    BallOperatorMatrix A{g, Eigen::MatrixXd(n, n), ball_lambda(params.p, params.alpha, g.N())};
    for (std::size_t i = 0; i < n; ++i) {
        A.entries(i, i) = diag;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = by_distance[static_cast<std::size_t>(*g.distance_exp(i, j) + g.M() - 1)];
            A.entries(i, j) = v;
            A.entries(j, i) = v;
        }
    }
    return A;
}

GridFunction BallOperatorMatrix::apply(const GridFunction& u) const {
    if (!(u.grid() == grid)) {
        throw PreconditionError("grid mismatch");
    }
    const auto n = static_cast<Eigen::Index>(grid.dim());
    Eigen::Map<const Eigen::VectorXcd> x(u.values().data(), n);
    const Eigen::VectorXcd y = entries.cast<Complex>() * x;
    return GridFunction(grid, std::vector<Complex>(y.data(), y.data() + n));
}

GridFunction spectral_apply(const OperatorParams& params, const GridFunction& u, FourierMethod method) {
    require_positive_alpha(params.alpha);
    GridFunction U = grid_fourier(u, method);
    const GridSpec& dual = U.grid();
    U[0] = 0.0;
    for (std::size_t j = 1; j < U.size(); ++j) {
        U[j] *= real_power(params.p, *dual.abs_exp(j) * params.alpha);
    }
    return inverse_grid_fourier(U, method);
}

std::pair<TestFunction, TestFunction> split_at_ball(const TestFunction& f, int N) {
    const auto r = f.min_radius_exp();
    if (!r) {
        return {};
    }
    const TestFunction fine = refine(f, std::min(*r, N));
    const Ball domain(PAdicExpansion(f.terms().front().ball.prime()), N);
    std::vector<TestFunction::Term> inside;
    std::vector<TestFunction::Term> outside;
    for (const auto& t : fine.terms()) {
        (domain.contains(t.ball) ? inside : outside).push_back(t);
    }
    return {TestFunction(std::move(inside)), TestFunction(std::move(outside))};
}

Complex exterior_constant_RN(const OperatorParams& params, const TestFunction& u, int N) {
    require_positive_alpha(params.alpha);
    const auto [inside, outside] = split_at_ball(u, N);
    if (!inside.empty()) {
        throw PreconditionError("R_N needs a function supported outside B_" + std::to_string(N) + "; "
                                + inside.terms().front().ball.describe() + " lies inside");
    }
    Complex s{};
    for (const auto& t : outside.terms()) {
        // the ball is disjoint from B_N, so |x| = |x0| on it
        const int k = -*t.ball.center().valuation();
        s += t.coefficient * real_power(params.p, t.ball.radius_exp()) * real_power(params.p, -k * (params.alpha + 1.0));
    }
    return hypersingular_constant(params.p, params.alpha) * s;
}

Complex exterior_constant_RN(const OperatorParams& params, const ExtendedGridFunction& u) {
    require_positive_alpha(params.alpha);
    const int N = u.core.grid().N();
    Complex s{};
    for (std::size_t i = 0; i < u.exterior.size(); ++i) {
        const int k = N + 1 + static_cast<int>(i);
        s += u.exterior[i] * shell_volume(params.p, k) * real_power(params.p, -k * (params.alpha + 1.0));
    }
    return hypersingular_constant(params.p, params.alpha) * s;
}

GridFunction restricted_apply(const OperatorParams& params, const BallOperatorMatrix& A, const ExtendedGridFunction& u) {
    GridFunction out = A.apply(u.core);
    const Complex rn = exterior_constant_RN(params, u);
    for (auto& v : out.values()) {
        v += rn;
    }
    return out;
}

} // namespace padic
