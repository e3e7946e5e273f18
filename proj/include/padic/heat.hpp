#pragma once

#include "padic/function_space.hpp"
#include "padic/vladimirov.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace padic {

struct KernelParams {
    std::int64_t p;
    double alpha;
    double t;

    void validate() const;
};

struct KernelEvaluation {
    double value = 0.0;
    double truncation_bound = 0.0;
    int shells_used = 0;
};

/// c_k(t) = exp(-p^{k alpha} t) - exp(-p^{(k+1) alpha} t), evaluated with expm1.
double coeff_ck(std::int64_t p, double alpha, int k, double t);

struct FirstOrderSplit {
    double linear;           // p^{-k alpha} (p^alpha - 1) t
    double remainder_bound;  // C p^{-2 k alpha} t^2
};

/// Linear part of c_{-k}(t) and the certified bound on the rest.
FirstOrderSplit first_order_split(std::int64_t p, double alpha, int k, double t);

/// C = (p^{2 alpha} - 1) / 2, from |h''| <= 1 for h(x) = e^{-x} - 1 + x.
double remainder_constant(std::int64_t p, double alpha);

/// Shell coefficient of the heat kernel tail: Z(t,x) <= K t |x|^{-alpha-1} with
/// K = (p^alpha - 1) / (1 - p^{-alpha-1}); also the exact leading term of the
/// alternating series.
double tail_constant(std::int64_t p, double alpha);

/// Z(t, x) with |x|_p = p^m (nullopt: x = 0), by the positive shell series.
KernelEvaluation kernel_Z(const KernelParams& kp, std::optional<int> shell);
KernelEvaluation kernel_Z(const KernelParams& kp, const PAdicExpansion& x);

/// The alternating series in |x|^{-alpha m - 1}; x = 0 is a DomainError.
KernelEvaluation kernel_Z_alternating(const KernelParams& kp, std::optional<int> shell);

/// Z(t,.) tabulated on shells [k_lo, k_hi] with the x = 0 value below and the
/// leading power tail above. truncation_bound is a sup-norm error bound.
RadialFunction heat_kernel_profile(const KernelParams& kp, int k_lo, int k_hi);

/// int Z(t,x) dx assembled from the ball below k_lo, the shells and a
/// majorised tail. value = mass, truncation_bound bounds |value - true mass|.
KernelEvaluation heat_kernel_mass(const KernelParams& kp, int k_lo, int k_hi);

/// Partial sums T(n) = sum_{k >= n} c_{-k}(t) p^{-k} for n in [n_lo, n_hi],
/// which is Z(t, x) at |x| = p^n. Computed top-down from an asymptotic start
/// whose error is carried in `bound`.
class ShellSums {
public:
    ShellSums(const KernelParams& kp, int n_lo, int n_hi);

    int n_lo() const noexcept { return n_lo_; }
    int n_hi() const noexcept { return n_hi_; }
    /// T(n); n_lo <= n <= n_hi + 1.
    double T(int n) const;
    /// int_{B_l} Z(t, x) dx = exp(-p^{-l alpha} t) + p^l T(l + 1).
    double inside(int l) const;
    /// (S(t) 1_{B(x0, l)})(x) with |x - x0|_p = p^n (nullopt or n <= l: inside).
    double image(int l, std::optional<int> n) const;
    /// Absolute error bound carried by every T(n).
    double bound() const noexcept { return bound_; }

private:
    KernelParams kp_;
    int n_lo_;
    int n_hi_;
    std::vector<double> T_;
    double bound_;
};

/// S(t) 1_{B(x0,l)} as a function of |x - x0|, exact shells up to k_hi and the
/// asymptotic tail p^l K t |x|^{-alpha-1} beyond.
RadialFunction semigroup_on_indicator(const KernelParams& kp, const Ball& b, int k_hi);

/// (S(t) f)(x) for a test function.
Complex semigroup_apply(const KernelParams& kp, const TestFunction& f, const PAdicExpansion& x);

/// S(t) on an extended grid function; the output keeps the same exterior shells
/// and adds the escaped mass to truncation_bound.
ExtendedGridFunction semigroup_apply(const KernelParams& kp, const ExtendedGridFunction& u);
ExtendedGridFunction semigroup_apply(const KernelParams& kp, const GridFunction& u, std::size_t shells);

/// lambda = (p - 1) / (p^{alpha+1} - 1) p^{alpha (1 - N)}.
double ball_kernel_lambda(const KernelParams& kp, int N);

/// c(t) of the ball kernel from its power series with a factorial tail bound.
KernelEvaluation ball_constant_c(const KernelParams& kp, int N);
/// Same quantity from the mass identity p^{-N} (1 - e^{lambda t} int_{B_N} Z).
double ball_constant_c_from_mass(const KernelParams& kp, int N);

/// Z_N(t,.) = e^{lambda t} Z + c(t) on shells [k_lo, N] of B_N.
RadialFunction ball_kernel_ZN(const KernelParams& kp, int N, int k_lo);
/// int_{B_N} Z_N(t, x) dx.
KernelEvaluation ball_kernel_mass(const KernelParams& kp, int N);

/// T_N(t) u by integrating Z_N against u cell by cell.
GridFunction ball_semigroup_apply(const KernelParams& kp, const GridFunction& u);

/// exp(-t (A - lambda I)) for the exact ball matrix, by scaling and squaring.
Eigen::MatrixXd ball_semigroup_matrix(const KernelParams& kp, const GridSpec& grid);

/// Matrix exponential by scaling and squaring with a Taylor core.
Eigen::MatrixXd expm(const Eigen::MatrixXd& A);

/// Resolvent weights w_k = (p^alpha - 1) p^{k(alpha+1)} / ((mu + p^{alpha k})(mu + p^{alpha k + alpha})).
double resolvent_weight(std::int64_t p, double alpha, double mu, int k);

/// (mu + D^alpha)^{-1} u on the whole space through ball averages.
ExtendedGridFunction resolvent_apply(std::int64_t p, double alpha, double mu, const ExtendedGridFunction& u);

/// Fourier multiplier 1 / (mu + |xi|^alpha) on the grid group.
GridFunction spectral_resolvent(std::int64_t p, double alpha, double mu, const GridFunction& u,
                                FourierMethod method = FourierMethod::Direct);

/// Laplace transform int_0^inf e^{-mu t} S(t) u dt by the trapezoid rule in log t.
ExtendedGridFunction laplace_resolvent(std::int64_t p, double alpha, double mu, const ExtendedGridFunction& u,
                                       double step = 0.05);

/// int_{|xi| = p^n} chi(x xi) d xi for |x|_p = p^m (nullopt: x = 0).
double shell_character_integral(std::int64_t p, int n, std::optional<int> m);

/// Green kernel E_mu at |x|_p = p^m (nullopt: x = 0). Needs alpha > 1, mu > 0.
KernelEvaluation green_kernel_Emu(std::int64_t p, double alpha, double mu, std::optional<int> shell);

/// ||E_mu(.) - E_mu(. + h)||_{L^1(Z_p)} for |h|_p = p^r (nullopt: h = 0).
KernelEvaluation smoothness_modulus_Phi(std::int64_t p, double alpha, double mu, std::optional<int> r);

} // namespace padic
