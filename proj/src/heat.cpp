#include "padic/heat.hpp"

#include "padic/errors.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <string>

namespace padic {

namespace {

constexpr int kMaxShells = 4000;

double shell_count_guard(int used) {
    if (used > kMaxShells) {
        throw PrecisionError("series did not reach its certificate within " + std::to_string(kMaxShells) + " terms");
    }
    return 0.0;
}

void require_mu(double mu) {
    if (!(mu > 0.0)) {
        throw DomainError("mu must be positive (got " + std::to_string(mu) + ")");
    }
}

} // namespace

void KernelParams::validate() const {
    require_prime(p);
    if (!(alpha > 0.0)) {
        throw DomainError("alpha must be positive (got " + std::to_string(alpha) + ")");
    }
    if (!(t > 0.0)) {
        throw DomainError("t must be positive (got " + std::to_string(t) + ")");
    }
}

double coeff_ck(std::int64_t p, double alpha, int k, double t) {
    const double a = real_power(p, k * alpha);
    const double b = real_power(p, (k + 1) * alpha);
    return -std::exp(-a * t) * std::expm1(-(b - a) * t);
}

double remainder_constant(std::int64_t p, double alpha) {
    return 0.5 * (real_power(p, 2.0 * alpha) - 1.0);
}

FirstOrderSplit first_order_split(std::int64_t p, double alpha, int k, double t) {
    const double a = real_power(p, -k * alpha);
    return {a * (real_power(p, alpha) - 1.0) * t, remainder_constant(p, alpha) * a * a * t * t};
}

double tail_constant(std::int64_t p, double alpha) {
    return (real_power(p, alpha) - 1.0) / (1.0 - real_power(p, -alpha - 1.0));
}

// ---------------------------------------------------------------- Z(t, x)

KernelEvaluation kernel_Z(const KernelParams& kp, std::optional<int> shell) {
    kp.validate();
    const std::int64_t p = kp.p;
    const double alpha = kp.alpha;
    const double t = kp.t;
    const double K = tail_constant(p, alpha);
    KernelEvaluation r;

    // sum_{k <= top} p^k c_k(t), walking down
    const int top = shell ? -*shell : 0;
    double lower_bound = 0.0;
    for (int k = top;; --k) {
        r.value += real_power(p, k) * coeff_ck(p, alpha, k, t);
        ++r.shells_used;
        shell_count_guard(r.shells_used);
        // c_j <= (p^alpha - 1) p^{j alpha} t, so the rest is geometric
        lower_bound = K * t * real_power(p, (k - 1) * (alpha + 1.0));
        if (real_power(p, k * alpha) * t < 1.0 && lower_bound <= 1e-17 * r.value) {
            break;
        }
    }
    r.truncation_bound = lower_bound;

    if (!shell) {
        for (int k = 1;; ++k) {
            r.value += real_power(p, k) * coeff_ck(p, alpha, k, t);
            ++r.shells_used;
            shell_count_guard(r.shells_used);
            const int n = k + 1;
            const double g = real_power(p, n) * std::exp(-real_power(p, n * alpha) * t);
            const double ratio = static_cast<double>(p) * std::exp(-(real_power(p, (n + 1) * alpha) - real_power(p, n * alpha)) * t);
            if (ratio < 0.5) {
                const double upper = g / (1.0 - ratio);
                if (upper <= 1e-17 * r.value) {
                    r.truncation_bound += upper;
                    break;
                }
            }
        }
    }
    // positive terms: rounding grows at most linearly with their number
    r.truncation_bound += 2.0 * DBL_EPSILON * r.shells_used * r.value;
    return r;
}

KernelEvaluation kernel_Z(const KernelParams& kp, const PAdicExpansion& x) {
    const auto v = x.valuation();
    return kernel_Z(kp, v ? std::optional<int>(-*v) : std::nullopt);
}

KernelEvaluation kernel_Z_alternating(const KernelParams& kp, std::optional<int> shell) {
    kp.validate();
    if (!shell) {
        throw DomainError("the alternating series for Z(t,x) needs x != 0");
    }
    const std::int64_t p = kp.p;
    const long double alpha = kp.alpha;
    const int m = *shell;
    const long double pl = static_cast<long double>(p);
    const long double y = static_cast<long double>(kp.t) * std::pow(pl, -m * alpha);
    const long double z = std::pow(pl, alpha) * y;
    const long double outer = std::pow(pl, static_cast<long double>(-m));
    const long double denom_floor = 1.0L - std::pow(pl, -alpha - 1.0L);

    KernelEvaluation r;
    long double sum = 0.0L;
    long double abs_sum = 0.0L;
    long double a = 1.0L;  // y^n / n!
    long double b = 1.0L;  // z^n / n!
    for (int n = 1;; ++n) {
        a *= y / n;
        b *= z / n;
        const long double pn = std::pow(pl, alpha * n);
        const long double coeff = (1.0L - pn) / (1.0L - std::pow(pl, -alpha * n - 1.0L));
        const long double t_n = ((n % 2) ? -1.0L : 1.0L) * a * coeff * outer;
        sum += t_n;
        abs_sum += std::fabs(t_n);
        ++r.shells_used;
        shell_count_guard(r.shells_used);
        if (n + 2 > z) {
            const long double next = b * z / (n + 1) * outer / denom_floor;
            const long double tail = next / (1.0L - z / (n + 2));
            if (tail <= 1e-19L * std::fabs(sum) || tail < 1e-300L) {
                r.truncation_bound = static_cast<double>(tail + 64.0L * LDBL_EPSILON * abs_sum);
                break;
            }
        }
    }
    r.value = static_cast<double>(sum);
    return r;
}

RadialFunction heat_kernel_profile(const KernelParams& kp, int k_lo, int k_hi) {
    kp.validate();
    if (k_hi < k_lo) {
        throw PreconditionError("empty shell range");
    }
    const std::int64_t p = kp.p;
    const double alpha = kp.alpha;
    std::vector<Complex> shells;
    double bound = 0.0;
    for (int k = k_lo; k <= k_hi; ++k) {
        const auto e = kernel_Z(kp, k);
        shells.emplace_back(e.value);
        bound = std::max(bound, e.truncation_bound);
    }
    const auto z0 = kernel_Z(kp, std::nullopt);
    const auto below = kernel_Z(kp, k_lo - 1);
    // Z is radially decreasing, so inside B_{k_lo - 1} it stays within [Z(p^{k_lo-1}), Z(0)]
    bound = std::max(bound, z0.value - below.value + z0.truncation_bound + below.truncation_bound);
    const double K = tail_constant(p, alpha);
    const int n = k_hi + 1;
    const double tail_err = std::min(K * kp.t * real_power(p, -n * (alpha + 1.0)),
                                     remainder_constant(p, alpha) * kp.t * kp.t * real_power(p, -n * (2.0 * alpha + 1.0))
                                         / (1.0 - real_power(p, -2.0 * alpha - 1.0)));
    bound = std::max(bound, tail_err);
    RadialFunction f(p, k_lo, std::move(shells), z0.value, PowerTail{K * kp.t, -alpha - 1.0});
    f.truncation_bound = bound;
    return f;
}

KernelEvaluation heat_kernel_mass(const KernelParams& kp, int k_lo, int k_hi) {
    kp.validate();
    const std::int64_t p = kp.p;
    const double alpha = kp.alpha;
    KernelEvaluation r;
    const ShellSums sums(kp, k_lo, k_lo);
    r.value = sums.inside(k_lo - 1);
    r.truncation_bound = real_power(p, k_lo - 1) * sums.bound();
    for (int k = k_lo; k <= k_hi; ++k) {
        const auto e = kernel_Z(kp, k);
        r.value += e.value * shell_volume(p, k);
        r.truncation_bound += e.truncation_bound * shell_volume(p, k);
        ++r.shells_used;
    }
    const double K = tail_constant(p, alpha);
    const int n = k_hi + 1;
    const double tail = K * kp.t * (1.0 - 1.0 / static_cast<double>(p)) * real_power(p, -n * alpha) / (1.0 - real_power(p, -alpha));
    const double tail_err = remainder_constant(p, alpha) * kp.t * kp.t / (1.0 - real_power(p, -2.0 * alpha - 1.0))
                          * (1.0 - 1.0 / static_cast<double>(p)) * real_power(p, -n * 2.0 * alpha) / (1.0 - real_power(p, -2.0 * alpha));
    r.value += tail;
    r.truncation_bound += std::min(tail, tail_err) + 2.0 * DBL_EPSILON * (r.shells_used + 2) * r.value;
    return r;
}

// ---------------------------------------------------------------- ShellSums

ShellSums::ShellSums(const KernelParams& kp, int n_lo, int n_hi) : kp_(kp), n_lo_(n_lo), n_hi_(n_hi), bound_(0.0) {
    kp.validate();
    if (n_hi < n_lo) {
        throw PreconditionError("empty shell range");
    }
    const std::int64_t p = kp.p;
    const double alpha = kp.alpha;
    const double K = tail_constant(p, alpha);
    const double C = remainder_constant(p, alpha);
    const double geo2 = 1.0 - real_power(p, -2.0 * alpha - 1.0);

    int top = n_hi + 1;
    while (C * kp.t * real_power(p, -top * alpha) / (geo2 * K) > 1e-17) {
        ++top;
        shell_count_guard(top - n_hi);
    }
    double T = K * kp.t * real_power(p, -top * (alpha + 1.0));
    bound_ = C * kp.t * kp.t * real_power(p, -top * (2.0 * alpha + 1.0)) / geo2;
    T_.assign(static_cast<std::size_t>(n_hi - n_lo + 2), 0.0);
    for (int n = top - 1; n >= n_lo; --n) {
        T += coeff_ck(p, alpha, -n, kp.t) * real_power(p, -n);
        if (n <= n_hi + 1) {
            T_[static_cast<std::size_t>(n - n_lo)] = T;
        }
    }
    if (top == n_hi + 1) {
        T_.back() = K * kp.t * real_power(p, -top * (alpha + 1.0));
    }
}

double ShellSums::T(int n) const {
    if (n < n_lo_ || n > n_hi_ + 1) {
        throw PreconditionError("shell " + std::to_string(n) + " outside the tabulated range");
    }
    return T_[static_cast<std::size_t>(n - n_lo_)];
}

double ShellSums::inside(int l) const {
    return std::exp(-real_power(kp_.p, -l * kp_.alpha) * kp_.t) + real_power(kp_.p, l) * T(l + 1);
}

double ShellSums::image(int l, std::optional<int> n) const {
    if (!n || *n <= l) {
        return inside(l);
    }
    return real_power(kp_.p, l) * T(*n);
}

// ---------------------------------------------------------------- S(t)

RadialFunction semigroup_on_indicator(const KernelParams& kp, const Ball& b, int k_hi) {
    kp.validate();
    const int l = b.radius_exp();
    if (k_hi <= l) {
        k_hi = l + 1;
    }
    const std::int64_t p = kp.p;
    const double alpha = kp.alpha;
    const ShellSums sums(kp, l + 1, k_hi);
    std::vector<Complex> shells;
    for (int n = l + 1; n <= k_hi; ++n) {
        shells.emplace_back(real_power(p, l) * sums.T(n));
    }
    const double scale = real_power(p, l);
    RadialFunction f(p, l + 1, std::move(shells), sums.inside(l),
                     PowerTail{scale * tail_constant(p, alpha) * kp.t, -alpha - 1.0});
    const int n = k_hi + 1;
    f.truncation_bound = scale * (sums.bound()
                                  + remainder_constant(p, alpha) * kp.t * kp.t * real_power(p, -n * (2.0 * alpha + 1.0))
                                        / (1.0 - real_power(p, -2.0 * alpha - 1.0)));
    return f;
}

Complex semigroup_apply(const KernelParams& kp, const TestFunction& f, const PAdicExpansion& x) {
    kp.validate();
    if (f.empty()) {
        return {};
    }
    int lo = f.terms().front().ball.radius_exp();
    int hi = lo;
    std::vector<std::optional<int>> dist;
    for (const auto& t : f.terms()) {
        lo = std::min(lo, t.ball.radius_exp());
        const auto v = difference_valuation(x, t.ball.center());
        dist.push_back(v ? std::optional<int>(-*v) : std::nullopt);
        hi = std::max(hi, std::max(t.ball.radius_exp(), dist.back().value_or(lo)));
    }
    const ShellSums sums(kp, lo + 1, hi);
    Complex s{};
    for (std::size_t i = 0; i < f.terms().size(); ++i) {
        s += f.terms()[i].coefficient * sums.image(f.terms()[i].ball.radius_exp(), dist[i]);
    }
    return s;
}

ExtendedGridFunction semigroup_apply(const KernelParams& kp, const ExtendedGridFunction& u) {
    kp.validate();
    const GridSpec& g = u.core.grid();
    const int N = g.N();
    const int M = g.M();
    const int L = u.outer_exp();
    const std::int64_t p = kp.p;
    if (p != g.p()) {
        throw PreconditionError("prime mismatch between kernel and grid");
    }
    const ShellSums sums(kp, -M + 1, L);
    std::vector<double> by_distance(static_cast<std::size_t>(N + M));
    for (int d = -M + 1; d <= N; ++d) {
        by_distance[static_cast<std::size_t>(d + M - 1)] = sums.image(-M, d);
    }
    const double diag = sums.inside(-M);

    ExtendedGridFunction out(GridFunction(g), u.exterior.size());
    Complex core_sum{};
    for (std::size_t j = 0; j < g.dim(); ++j) {
        core_sum += u.core[j];
    }
    for (std::size_t i = 0; i < g.dim(); ++i) {
        Complex s = diag * u.core[i];
        for (std::size_t j = 0; j < g.dim(); ++j) {
            if (i != j) {
                s += by_distance[static_cast<std::size_t>(*g.distance_exp(i, j) + M - 1)] * u.core[j];
            }
        }
        out.core[i] = s;
    }
    Complex ext_to_core{};
    for (std::size_t k = 0; k < u.exterior.size(); ++k) {
        const int m = N + 1 + static_cast<int>(k);
        ext_to_core += u.exterior[k] * (sums.inside(m) - sums.inside(m - 1));
    }
    for (auto& v : out.core.values()) {
        v += ext_to_core;
    }
    for (std::size_t k = 0; k < u.exterior.size(); ++k) {
        const int n = N + 1 + static_cast<int>(k);
        Complex s = core_sum * sums.image(-M, n);
        for (std::size_t q = 0; q < u.exterior.size(); ++q) {
            const int m = N + 1 + static_cast<int>(q);
            s += u.exterior[q] * (sums.image(m, n) - sums.image(m - 1, n));
        }
        out.exterior[k] = s;
    }
    const double l1 = norms(u).l1;
    const double pd = static_cast<double>(p);
    out.truncation_bound = u.truncation_bound
                         + l1 * -std::expm1(-real_power(p, -L * kp.alpha) * kp.t)
                         + real_power(p, L) * 2.0 * l1 * pd / (pd - 1.0) * sums.bound();
    return out;
}

ExtendedGridFunction semigroup_apply(const KernelParams& kp, const GridFunction& u, std::size_t shells) {
    return semigroup_apply(kp, ExtendedGridFunction(u, shells));
}

// ---------------------------------------------------------------- Z_N, T_N

double ball_kernel_lambda(const KernelParams& kp, int N) {
    return ball_lambda(kp.p, kp.alpha, N);
}

KernelEvaluation ball_constant_c(const KernelParams& kp, int N) {
    kp.validate();
    const std::int64_t p = kp.p;
    const long double pl = static_cast<long double>(p);
    const long double alpha = kp.alpha;
    const long double y = static_cast<long double>(kp.t) * std::pow(pl, -N * alpha);
    const long double lam = ball_kernel_lambda(kp, N);
    const long double pre = std::pow(pl, static_cast<long double>(-N));
    const long double factor = pre * (1.0L - 1.0L / pl) * std::exp(lam * static_cast<long double>(kp.t));

    KernelEvaluation r;
    long double a = 1.0L;
    long double sum = 1.0L / (1.0L - 1.0L / pl);
    long double abs_sum = sum;
    for (int n = 1;; ++n) {
        a *= y / n;
        const long double term = ((n % 2) ? -1.0L : 1.0L) * a / (1.0L - std::pow(pl, -alpha * n - 1.0L));
        sum += term;
        abs_sum += std::fabs(term);
        ++r.shells_used;
        shell_count_guard(r.shells_used);
        if (n + 2 > y) {
            const long double tail = a * y / (n + 1) / (1.0L - 1.0L / pl) / (1.0L - y / (n + 2));
            if (tail < 1e-21L * abs_sum) {
                r.truncation_bound = static_cast<double>(factor * (tail + 64.0L * LDBL_EPSILON * abs_sum) + 4.0L * LDBL_EPSILON * pre);
                break;
            }
        }
    }
    r.value = static_cast<double>(pre - factor * sum);
    return r;
}

double ball_constant_c_from_mass(const KernelParams& kp, int N) {
    const ShellSums sums(kp, N + 1, N + 1);
    const double lam = ball_kernel_lambda(kp, N);
    // 1 - e^{lt} I with I = e^{-a t} + p^N T: keep the small pieces together
    const double a = real_power(kp.p, -N * kp.alpha);
    const double one_minus = -std::expm1((lam - a) * kp.t) - std::exp(lam * kp.t) * real_power(kp.p, N) * sums.T(N + 1);
    return real_power(kp.p, -N) * one_minus;
}

RadialFunction ball_kernel_ZN(const KernelParams& kp, int N, int k_lo) {
    kp.validate();
    if (k_lo > N) {
        throw PreconditionError("k_lo must not exceed N");
    }
    const double e = std::exp(ball_kernel_lambda(kp, N) * kp.t);
    const auto c = ball_constant_c(kp, N);
    const RadialFunction z = heat_kernel_profile(kp, k_lo, N);
    std::vector<Complex> shells;
    for (int k = k_lo; k <= N; ++k) {
        shells.push_back(e * z.shell_value(k) + c.value);
    }
    RadialFunction out(kp.p, k_lo, std::move(shells), e * z.value_at_zero() + c.value);
    out.truncation_bound = e * z.truncation_bound + c.truncation_bound;
    return out;
}

KernelEvaluation ball_kernel_mass(const KernelParams& kp, int N) {
    kp.validate();
    const double e = std::exp(ball_kernel_lambda(kp, N) * kp.t);
    const auto c = ball_constant_c(kp, N);
    // shells of B_N from the positive series, the deep core from the shell sums
    const int k_lo = N - 60;
    const ShellSums sums(kp, k_lo, k_lo);
    KernelEvaluation r;
    double zmass = sums.inside(k_lo - 1);
    double zbound = real_power(kp.p, k_lo - 1) * sums.bound();
    for (int k = k_lo; k <= N; ++k) {
        const auto z = kernel_Z(kp, k);
        zmass += z.value * shell_volume(kp.p, k);
        zbound += z.truncation_bound * shell_volume(kp.p, k);
        ++r.shells_used;
    }
    r.value = e * zmass + real_power(kp.p, N) * c.value;
    r.truncation_bound = e * zbound + real_power(kp.p, N) * c.truncation_bound;
    return r;
}

GridFunction ball_semigroup_apply(const KernelParams& kp, const GridFunction& u) {
    kp.validate();
    const GridSpec& g = u.grid();
    const int N = g.N();
    const int M = g.M();
    const ShellSums sums(kp, -M + 1, N);
    const double e = std::exp(ball_kernel_lambda(kp, N) * kp.t);
    const double cc = g.cell_measure() * ball_constant_c(kp, N).value;
    std::vector<double> by_distance(static_cast<std::size_t>(N + M));
    for (int d = -M + 1; d <= N; ++d) {
        by_distance[static_cast<std::size_t>(d + M - 1)] = e * sums.image(-M, d) + cc;
    }
    const double diag = e * sums.inside(-M) + cc;
    GridFunction out(g);
    for (std::size_t i = 0; i < g.dim(); ++i) {
        Complex s = diag * u[i];
        for (std::size_t j = 0; j < g.dim(); ++j) {
            if (i != j) {
                s += by_distance[static_cast<std::size_t>(*g.distance_exp(i, j) + M - 1)] * u[j];
            }
        }
        out[i] = s;
    }
    return out;
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& A) {
    const double norm = A.cwiseAbs().colwise().sum().maxCoeff();
    int s = 0;
    if (norm > 0.5) {
        s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    }
    const Eigen::MatrixXd B = A / std::ldexp(1.0, s);
    const auto n = A.rows();
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= 40; ++k) {
        term = term * B / static_cast<double>(k);
        result += term;
        if (term.cwiseAbs().maxCoeff() < 1e-20 * result.cwiseAbs().maxCoeff()) {
            break;
        }
    }
    for (int i = 0; i < s; ++i) {
        result = result * result;
    }
    return result;
}

Eigen::MatrixXd ball_semigroup_matrix(const KernelParams& kp, const GridSpec& grid) {
    kp.validate();
    const auto A = ball_matrix(OperatorParams{kp.p, kp.alpha, grid});
    const auto n = static_cast<Eigen::Index>(grid.dim());
    return expm(-kp.t * (A.entries - A.lambda * Eigen::MatrixXd::Identity(n, n)));
}

// ---------------------------------------------------------------- resolvent

double resolvent_weight(std::int64_t p, double alpha, double mu, int k) {
    const double a = real_power(p, alpha * k);
    const double b = real_power(p, alpha * k + alpha);
    return (real_power(p, alpha) - 1.0) * real_power(p, k * (alpha + 1.0)) / ((mu + a) * (mu + b));
}

namespace {

/// Partial sums of the resolvent weights indexed by ball radius r = -k:
/// H(r) = sum_{r' >= r} w_{-r'} and G(r) = sum_{r' <= r} w_{-r'} p^{r'}.
struct ResolventSums {
    std::int64_t p;
    double alpha;
    double mu;
    int r_lo;
    int r_hi;
    std::vector<double> H;  // r in [r_lo, r_hi + 1]
    std::vector<double> G;  // r in [r_lo - 1, r_hi]
    double bound = 0.0;

    ResolventSums(std::int64_t p_, double alpha_, double mu_, int lo, int hi)
        : p(p_), alpha(alpha_), mu(mu_), r_lo(lo), r_hi(hi) {
        const double pa = real_power(p, alpha);
        // H: large r means k -> -inf, w_k <= (p^a - 1) p^{k(a+1)} / mu^2
        int top = hi + 1;
        auto h_tail = [&](int r) {
            return (pa - 1.0) * real_power(p, -r * (alpha + 1.0)) / (mu * mu * (1.0 - real_power(p, -alpha - 1.0)));
        };
        double acc = 0.0;
        {
            double scale = 0.0;
            for (int r = lo; r <= hi + 1; ++r) {
                scale = std::max(scale, resolvent_weight(p, alpha, mu, -r));
            }
            while (h_tail(top) > 1e-18 * scale && top - hi < kMaxShells) {
                ++top;
            }
        }
        const double hb = h_tail(top);
        H.assign(static_cast<std::size_t>(hi - lo + 2), 0.0);
        for (int r = top - 1; r >= lo; --r) {
            acc += resolvent_weight(p, alpha, mu, -r);
            if (r <= hi + 1) {
                H[static_cast<std::size_t>(r - lo)] = acc;
            }
        }
        if (top == hi + 1) {
            H.back() = 0.0;
        }
        // G: small r means k -> +inf, w_k p^{-k} <= (p^a - 1) p^{-k a - a}
        auto g_tail = [&](int r) {
            return (pa - 1.0) * real_power(p, r * alpha - alpha) / (1.0 - real_power(p, -alpha));
        };
        int bottom = lo - 1;
        {
            double scale = 0.0;
            for (int r = lo - 1; r <= hi; ++r) {
                scale = std::max(scale, resolvent_weight(p, alpha, mu, -r) * real_power(p, r));
            }
            while (g_tail(bottom) > 1e-18 * scale && lo - bottom < kMaxShells) {
                --bottom;
            }
        }
        const double gb = g_tail(bottom);
        G.assign(static_cast<std::size_t>(hi - lo + 2), 0.0);
        acc = 0.0;
        for (int r = bottom; r <= hi; ++r) {
            acc += resolvent_weight(p, alpha, mu, -r) * real_power(p, r);
            if (r >= lo - 1) {
                G[static_cast<std::size_t>(r - lo + 1)] = acc;
            }
        }
        bound = hb + gb;
    }

    double h(int r) const { return H[static_cast<std::size_t>(r - r_lo)]; }
    double g(int r) const { return G[static_cast<std::size_t>(r - r_lo + 1)]; }
    double a(int r) const { return resolvent_weight(p, alpha, mu, -r); }
};

} // namespace

ExtendedGridFunction resolvent_apply(std::int64_t p, double alpha, double mu, const ExtendedGridFunction& u) {
    require_mu(mu);
    if (!(alpha > 0.0)) {
        throw DomainError("alpha must be positive");
    }
    const GridSpec& g = u.core.grid();
    if (g.p() != p) {
        throw PreconditionError("prime mismatch between resolvent and grid");
    }
    const int N = g.N();
    const int M = g.M();
    const int L = u.outer_exp();
    const ResolventSums S(p, alpha, mu, -M + 1, L);
    const double cell = g.cell_measure();

    // mass of B_r(0) for r in [N, L]
    Complex core_mass{};
    for (std::size_t j = 0; j < g.dim(); ++j) {
        core_mass += cell * u.core[j];
    }
    std::vector<Complex> ball_mass{core_mass};
    for (std::size_t k = 0; k < u.exterior.size(); ++k) {
        ball_mass.push_back(ball_mass.back() + u.exterior[k] * shell_volume(p, N + 1 + static_cast<int>(k)));
    }
    const Complex total = ball_mass.back();
    auto mass = [&](int r) { return ball_mass[static_cast<std::size_t>(r - N)]; };

    // contribution of balls large enough to contain B_N: r in (N, L) plus r >= L
    std::vector<Complex> outer_from(static_cast<std::size_t>(L - N + 2), Complex{});
    // outer_from[r - N] = sum_{r' = r}^{L-1} a(r') mass(r') + total H(L)
    outer_from[static_cast<std::size_t>(L - N)] = total * S.h(L);
    for (int r = L - 1; r >= N; --r) {
        outer_from[static_cast<std::size_t>(r - N)] = outer_from[static_cast<std::size_t>(r - N + 1)] + S.a(r) * mass(r);
    }

    std::vector<double> by_distance(static_cast<std::size_t>(N + M));
    for (int d = -M + 1; d <= N; ++d) {
        by_distance[static_cast<std::size_t>(d + M - 1)] = cell * (S.h(d) - S.h(N + 1));
    }
    const double diag = S.g(-M) + cell * (S.h(-M + 1) - S.h(N + 1));

    ExtendedGridFunction out(GridFunction(g), u.exterior.size());
    const Complex shared = outer_from[1];  // r from N + 1
    for (std::size_t i = 0; i < g.dim(); ++i) {
        Complex s = diag * u.core[i] + shared;
        for (std::size_t j = 0; j < g.dim(); ++j) {
            if (i != j) {
                s += by_distance[static_cast<std::size_t>(*g.distance_exp(i, j) + M - 1)] * u.core[j];
            }
        }
        out.core[i] = s;
    }
    for (std::size_t k = 0; k < u.exterior.size(); ++k) {
        const int n = N + 1 + static_cast<int>(k);
        out.exterior[k] = u.exterior[k] * S.g(n - 1) + outer_from[static_cast<std::size_t>(n - N)];
    }
    const double l1 = norms(u).l1;
    const double a = real_power(p, -L * alpha);
    out.truncation_bound = u.truncation_bound / mu + l1 * a / (mu * (mu + a)) + S.bound * l1 * real_power(p, L + M);
    return out;
}

GridFunction spectral_resolvent(std::int64_t p, double alpha, double mu, const GridFunction& u, FourierMethod method) {
    require_mu(mu);
    GridFunction U = grid_fourier(u, method);
    const GridSpec& dual = U.grid();
    U[0] /= mu;
    for (std::size_t j = 1; j < U.size(); ++j) {
        U[j] /= mu + real_power(p, *dual.abs_exp(j) * alpha);
    }
    return inverse_grid_fourier(U, method);
}

ExtendedGridFunction laplace_resolvent(std::int64_t p, double alpha, double mu, const ExtendedGridFunction& u, double step) {
    require_mu(mu);
    const double s_lo = std::log(1e-10);
    const double s_hi = std::log(60.0 / mu);
    const int n = static_cast<int>(std::ceil((s_hi - s_lo) / step));
    const double h = (s_hi - s_lo) / n;
    ExtendedGridFunction acc(GridFunction(u.core.grid()), u.exterior.size());
    for (int i = 0; i <= n; ++i) {
        const double t = std::exp(s_lo + i * h);
        const double w = ((i == 0 || i == n) ? 0.5 : 1.0) * h * t * std::exp(-mu * t);
        const auto st = semigroup_apply(KernelParams{p, alpha, t}, u);
        for (std::size_t j = 0; j < acc.core.size(); ++j) {
            acc.core[j] += w * st.core[j];
        }
        for (std::size_t k = 0; k < acc.exterior.size(); ++k) {
            acc.exterior[k] += w * st.exterior[k];
        }
        acc.truncation_bound += w * st.truncation_bound;
    }
    return acc;
}

// ---------------------------------------------------------------- E_mu, Phi

double shell_character_integral(std::int64_t p, int n, std::optional<int> m) {
    if (!m || *m <= -n) {
        return shell_volume(p, n);
    }
    if (*m == 1 - n) {
        return -real_power(p, n - 1);
    }
    return 0.0;
}

KernelEvaluation green_kernel_Emu(std::int64_t p, double alpha, double mu, std::optional<int> shell) {
    require_prime(p);
    require_mu(mu);
    if (!(alpha > 1.0)) {
        throw DomainError("the Green kernel needs alpha > 1 (got " + std::to_string(alpha) + ")");
    }
    const double q = 1.0 - 1.0 / static_cast<double>(p);
    KernelEvaluation r;
    if (shell) {
        // 1/(p^{na} + mu) = 1/mu - p^{na}/(mu (p^{na} + mu)); the 1/mu parts cancel
        const int m = *shell;
        double s = 0.0;
        double tail = 0.0;
        for (int n = -m;; --n) {
            const double pa = real_power(p, n * alpha);
            s += real_power(p, n) * q * pa / (pa + mu);
            ++r.shells_used;
            shell_count_guard(r.shells_used);
            tail = q * real_power(p, (n - 1) * (alpha + 1.0)) / (mu * (1.0 - real_power(p, -alpha - 1.0)));
            if (tail <= 1e-18 * s) {
                break;
            }
        }
        const double pb = real_power(p, (1 - m) * alpha);
        r.value = -s / mu + real_power(p, -m) * pb / (mu * (pb + mu));
        r.truncation_bound = tail / mu;
        return r;
    }
    double s = 0.0;
    double b = 0.0;
    for (int n = 0;; --n) {
        s += real_power(p, n) * q / (real_power(p, n * alpha) + mu);
        ++r.shells_used;
        shell_count_guard(r.shells_used);
        b = real_power(p, n - 1) / mu;
        if (b <= 1e-18 * s) {
            break;
        }
    }
    double up = 0.0;
    for (int n = 1;; ++n) {
        s += real_power(p, n) * q / (real_power(p, n * alpha) + mu);
        ++r.shells_used;
        shell_count_guard(r.shells_used);
        up = q * real_power(p, (n + 1) * (1.0 - alpha)) / (1.0 - real_power(p, 1.0 - alpha));
        if (up <= 1e-17 * s) {
            break;
        }
    }
    r.value = s;
    r.truncation_bound = b + up;
    return r;
}

KernelEvaluation smoothness_modulus_Phi(std::int64_t p, double alpha, double mu, std::optional<int> r) {
    KernelEvaluation out;
    const auto e0 = green_kernel_Emu(p, alpha, mu, std::nullopt);
    if (!r) {
        return out;
    }
    const auto eh = green_kernel_Emu(p, alpha, mu, *r);
    // |x| < |h|: |x + h| = |h|; |x + h| < |h| is the mirror set; elsewhere no change.
    // Outside Z_p nothing is integrated, so for |h| > 1 only x in Z_p counts (once).
    const int top = *r <= 0 ? *r - 1 : 0;
    const double factor = *r <= 0 ? 2.0 : 1.0;
    double s = 0.0;
    double b = 0.0;
    int j = top;
    for (;; --j) {
        const auto ej = green_kernel_Emu(p, alpha, mu, j);
        s += shell_volume(p, j) * std::abs(ej.value - eh.value);
        b += shell_volume(p, j) * (ej.truncation_bound + eh.truncation_bound);
        ++out.shells_used;
        if (real_power(p, j - 1) * 2.0 * e0.value <= 1e-15 * std::max(s, 1e-300) || out.shells_used > 200) {
            break;
        }
    }
    out.value = factor * s;
    out.truncation_bound = factor * (b + real_power(p, j - 1) * 2.0 * (e0.value + e0.truncation_bound));
    return out;
}

} // namespace padic
