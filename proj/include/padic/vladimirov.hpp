#pragma once

#include "padic/function_space.hpp"

#include <Eigen/Dense>

#include <optional>

namespace padic {

struct OperatorParams {
    std::int64_t p;
    double alpha;
    std::optional<GridSpec> grid;

    const GridSpec& require_grid() const;
};

/// (1 - p^alpha) / (1 - p^{-alpha-1}), the normalising constant of the
/// hypersingular integral.
double hypersingular_constant(std::int64_t p, double alpha);

/// Smallest eigenvalue of the ball operator on B_N:
/// (p - 1) / (p^{alpha+1} - 1) * p^{alpha (1 - N)}.
double ball_lambda(std::int64_t p, double alpha, int N);

/// Value of D^alpha 1_{B(x0, l)} on the ball itself.
double indicator_inside_value(std::int64_t p, double alpha, int l);

/// D^alpha 1_{B(x0, l)} as a function of |y - x0|_p: constant inside the
/// ball, p^l Gamma_p(alpha + 1) |y - x0|^{-alpha-1} outside (exact power tail).
RadialFunction apply_to_indicator(const OperatorParams& params, const Ball& b);

/// Pointwise (D^alpha f)(y) for a test function, from the indicator formula.
Complex apply_to_test_function(const OperatorParams& params, const TestFunction& f, const PAdicExpansion& y);

struct RadialPowerImage {
    double coefficient;
    double exponent;
};

/// D^alpha |x|^beta = C |x|^{beta - alpha}, C = Gamma_p(beta+1) / Gamma_p(beta-alpha+1).
RadialPowerImage apply_radial_power(const OperatorParams& params, double beta);
/// The coefficient C in extended precision.
long double radial_power_coefficient(const OperatorParams& params, long double beta);

struct QuadratureResult {
    Complex value;
    double tail_bound;  // rigorous bound on the shells above k_hi
    int shells_used;
};

/// Shell-by-shell evaluation of the hypersingular integral at x. Shells at or
/// below the local-constancy radius contribute nothing; by default k_lo is
/// chosen just above it.
QuadratureResult hypersingular_quadrature(const OperatorParams& params, const TestFunction& f,
                                          const PAdicExpansion& x, int k_hi, std::optional<int> k_lo = std::nullopt);

struct BallOperatorMatrix {
    GridSpec grid;
    Eigen::MatrixXd entries;
    double lambda;

    GridFunction apply(const GridFunction& u) const;
};

/// Exact matrix of D^alpha restricted to B_N acting on grid functions.
BallOperatorMatrix ball_matrix(const OperatorParams& params);

/// Entry of the ball matrix for two cosets at distance p^k (nullopt: same coset).
double ball_kernel_entry(std::int64_t p, double alpha, int M, std::optional<int> distance_exp);

/// Fourier multiplier |xi|^alpha on the grid group (the xi = 0 mode is killed).
GridFunction spectral_apply(const OperatorParams& params, const GridFunction& u,
                            FourierMethod method = FourierMethod::Direct);

/// R_N(u) = K int_{|x|>p^N} |x|^{-alpha-1} u(x) dx for u supported outside B_N.
Complex exterior_constant_RN(const OperatorParams& params, const TestFunction& u, int N);
/// Same, for the exterior shells of an extended grid function.
Complex exterior_constant_RN(const OperatorParams& params, const ExtendedGridFunction& u);

/// Restriction to B_N of D^alpha applied to a whole-space function:
/// ball_matrix * core + R_N(exterior).
GridFunction restricted_apply(const OperatorParams& params, const BallOperatorMatrix& A, const ExtendedGridFunction& u);

/// Splits a test function into its part inside B_N and the remainder, refined
/// so that every ball is either inside B_N or disjoint from it.
std::pair<TestFunction, TestFunction> split_at_ball(const TestFunction& f, int N);

} // namespace padic
