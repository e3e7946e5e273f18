#include "padic/verify.hpp"

#include "padic/errors.hpp"
#include "padic/heat.hpp"
#include "padic/pme_solver.hpp"
#include "padic/vladimirov.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace padic::verify {

bool CriterionReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

PAdicExpansion zero(std::int64_t p) {
    return PAdicExpansion(p);
}

PAdicExpansion random_expansion(std::mt19937_64& rng, std::int64_t p, int lo, int hi) {
    std::map<int, int> d;
    std::uniform_int_distribution<int> digit(0, static_cast<int>(p) - 1);
    for (int j = lo; j <= hi; ++j) {
        d[j] = digit(rng);
    }
    return PAdicExpansion::from_digits(p, d);
}

GridFunction random_grid(std::mt19937_64& rng, const GridSpec& g, double lo, double hi) {
    std::uniform_real_distribution<double> U(lo, hi);
    GridFunction u(g);
    for (std::size_t i = 0; i < g.dim(); ++i) {
        u[i] = U(rng);
    }
    return u;
}

ExtendedGridFunction random_extended(std::mt19937_64& rng, const GridSpec& g, std::size_t shells, double lo, double hi) {
    ExtendedGridFunction u(random_grid(rng, g, lo, hi), shells);
    std::uniform_real_distribution<double> U(lo, hi);
    for (auto& v : u.exterior) {
        // decaying exterior keeps the mass finite and meaningful
        v = U(rng) * std::pow(0.3, static_cast<double>(&v - u.exterior.data()));
    }
    return u;
}

double sup_diff(const ExtendedGridFunction& a, const ExtendedGridFunction& b) {
    return norms(a - b).linf;
}

// ---------------------------------------------------------------- 1

CriterionReport criterion1() {
    CriterionReport r{1, "indicator closed form vs hypersingular quadrature", {}};
    const OperatorParams op{2, 2.0, std::nullopt};
    const Ball b0(zero(2), 0);
    const auto f = apply_to_indicator(op, b0);
    const double in = f.value_at_zero().real();
    const double s1 = f.shell_value(1).real();
    const double s2 = f.shell_value(2).real();
    r.checks.push_back({"closed form 4/7, -3/7, -3/56",
                        std::abs(in - 4.0 / 7) <= 1e-15 && std::abs(s1 + 3.0 / 7) <= 1e-15 && std::abs(s2 + 3.0 / 56) <= 1e-15,
                        fmt("inside %.17g, |y|=2 %.17g, |y|=4 %.17g", in, s1, s2)});

    const TestFunction d0 = TestFunction::indicator(b0);
    const std::vector<std::pair<PAdicExpansion, double>> points = {
        {zero(2), 4.0 / 7}, {PAdicExpansion::from_rational(2, 1, 2), -3.0 / 7}, {PAdicExpansion::from_rational(2, 1, 4), -3.0 / 56}};
    for (const auto& [x, expect] : points) {
        const auto q = hypersingular_quadrature(op, d0, x, 40);
        const double err = std::abs(q.value.real() - expect);
        r.checks.push_back({"quadrature at |x|=" + to_string(abs_value(x)),
                            err <= q.tail_bound + 1e-15 && q.tail_bound <= 1e-8,
                            fmt("value %.17g, error %.3g, certified tail %.3g", q.value.real(), err, q.tail_bound)});
    }

    const double total = integral(f).real();
    r.checks.push_back({"zero total mass of D^alpha Delta_0", std::abs(total) <= 1e-12,
                        fmt("inside mass %.17g, tail mass %.17g, sum %.3g", in, total - in, total)});

    std::mt19937_64 rng(101);
    double worst = 0.0;
    bool ok = true;
    std::uniform_int_distribution<int> rad(-2, 1);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int n = 0; n < 50; ++n) {
        TestFunction g;
        for (int t = 0; t < 3; ++t) {
            g += TestFunction::indicator(Ball(random_expansion(rng, 2, -2, 1), rad(rng)), coef(rng));
        }
        const PAdicExpansion x = random_expansion(rng, 2, -3, 2);
        const Complex closed = apply_to_test_function(op, g, x);
        const auto q = hypersingular_quadrature(op, g, x, 40);
        const double err = std::abs(q.value - closed);
        worst = std::max(worst, err);
        ok = ok && err <= q.tail_bound + 1e-13;
    }
    r.checks.push_back({"oracle agreement at 50 random points", ok, fmt("worst |closed - quadrature| %.3g", worst)});
    return r;
}

// ---------------------------------------------------------------- 2

CriterionReport criterion2() {
    CriterionReport r{2, "smallest eigenvalue of the ball matrix", {}};
    for (std::int64_t p : {2, 3}) {
        for (double alpha : {1.5, 2.0}) {
            for (int N : {0, 1}) {
                for (int M : {2, 3}) {
                    const GridSpec g(p, N, M);
                    const auto A = ball_matrix(OperatorParams{p, alpha, g});
                    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.entries, Eigen::EigenvaluesOnly);
                    const double lam = ball_lambda(p, alpha, N);
                    const double emin = es.eigenvalues().minCoeff();
                    const auto n = static_cast<Eigen::Index>(g.dim());
                    const double eig_vec = (A.entries * Eigen::VectorXd::Ones(n) - lam * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff();
                    r.checks.push_back({fmt("p=%d alpha=%.1f N=%d M=%d", static_cast<int>(p), alpha, N, M),
                                        std::abs(emin - lam) <= 1e-9 && eig_vec <= 1e-9 && std::abs(A.lambda - lam) <= 1e-15,
                                        fmt("lambda %.15g, min eigenvalue %.15g, |A1 - lambda 1| %.3g", lam, emin, eig_vec)});
                }
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------- 3

CriterionReport criterion3() {
    CriterionReport r{3, "heat kernel: two series, mass, power bound", {}};
    const std::int64_t p = 2;
    const double alpha = 2.0;
    double worst = 0.0;
    bool within = true;
    int count = 0;
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        for (int m : {0, 1, 2, 3}) {
            const KernelParams kp{p, alpha, t};
            const auto a = kernel_Z(kp, m);
            const auto b = kernel_Z_alternating(kp, m);
            const double d = std::abs(a.value - b.value);
            worst = std::max(worst, d);
            within = within && d <= 1e-9 && d <= a.truncation_bound + b.truncation_bound + 1e-15;
            ++count;
        }
    }
    r.checks.push_back({fmt("shell series vs alternating series at %d points", count), within, fmt("max difference %.3g", worst)});

    for (double t : {0.1, 1.0, 10.0}) {
        const auto m = heat_kernel_mass(KernelParams{p, alpha, t}, -40, 40);
        r.checks.push_back({fmt("mass at t=%g", t), std::abs(m.value - 1.0) <= 1e-8,
                            fmt("mass %.17g, certificate %.3g", m.value, m.truncation_bound)});
    }

    auto ratio = [&](double t, std::optional<int> m) {
        const double x = m ? real_power(p, *m) : 0.0;
        const double Z = kernel_Z(KernelParams{p, alpha, t}, m).value;
        return Z / (t * std::pow(std::pow(t, 1.0 / alpha) + x, -alpha - 1.0));
    };
    double C = 0.0;
    for (int i = 0; i < 10; ++i) {
        const double t = std::pow(10.0, -2.0 + 4.0 * i / 9.0);
        for (int j = 0; j < 10; ++j) {
            C = std::max(C, ratio(t, -5 + j));
        }
    }
    double C_dense = 0.0;
    for (int i = 0; i < 40; ++i) {
        const double t = std::pow(10.0, -3.0 + 6.0 * i / 39.0);
        C_dense = std::max(C_dense, ratio(t, std::nullopt));
        for (int m = -10; m <= 10; ++m) {
            C_dense = std::max(C_dense, ratio(t, m));
        }
    }
    r.checks.push_back({"power bound with one fitted constant", std::isfinite(C) && C > 0.0 && C_dense <= 2.0 * C,
                        fmt("C fitted on the 10x10 lattice %.6g; sup on a 40x22 lattice over wider ranges %.6g", C, C_dense)});
    return r;
}

// ---------------------------------------------------------------- 4

CriterionReport criterion4() {
    CriterionReport r{4, "semigroup laws", {}};
    const std::int64_t p = 2;
    const double alpha = 2.0;
    const GridSpec g(p, 1, 2);
    std::mt19937_64 rng(404);
    {
        const auto u = random_extended(rng, g, 40, -1.0, 1.0);
        double worst = 0.0;
        for (double t1 : {0.1, 0.5, 1.0}) {
            for (double t2 : {0.1, 0.5, 1.0}) {
                const auto a = semigroup_apply(KernelParams{p, alpha, t1}, semigroup_apply(KernelParams{p, alpha, t2}, u));
                const auto b = semigroup_apply(KernelParams{p, alpha, t1 + t2}, u);
                worst = std::max(worst, sup_diff(a, b));
            }
        }
        r.checks.push_back({"Chapman-Kolmogorov on the grid", worst <= 1e-8, fmt("max |S(t1)S(t2)u - S(t1+t2)u| %.3g", worst)});
    }
    {
        bool decreasing = true;
        double prev = INFINITY;
        double last = 0.0;
        for (int j = 0; j <= 20; ++j) {
            const auto f = semigroup_on_indicator(KernelParams{p, alpha, std::ldexp(1.0, -j)}, Ball(zero(p), 0), 40);
            const RadialFunction diff(p, f.k_min(), std::vector<Complex>(f.shells().begin(), f.shells().end()),
                                      f.value_at_zero() - 1.0, f.tail());
            last = norms(diff).l1;
            decreasing = decreasing && last < prev;
            prev = last;
        }
        r.checks.push_back({"C0 decay of ||S(2^-j) Delta_0 - Delta_0||_1", decreasing && last < 1e-3,
                            fmt("strictly decreasing: %s, value at j=20 %.3g", decreasing ? "yes" : "no", last)});
    }
    {
        double worst = -INFINITY;
        for (int n = 0; n < 100; ++n) {
            const auto u = random_extended(rng, g, 10, -1.0, 1.0);
            const double t = std::exp(std::uniform_real_distribution<double>(std::log(0.01), std::log(10.0))(rng));
            const auto s = semigroup_apply(KernelParams{p, alpha, t}, u);
            worst = std::max(worst, norms(s).l1 - norms(u).l1);
        }
        r.checks.push_back({"L1 contraction on 100 random functions", worst <= 1e-12, fmt("max ||S u||_1 - ||u||_1 = %.3g", worst)});
    }
    {
        bool ok = true;
        double worst = 0.0;
        for (int l : {-1, 0, 1}) {
            for (double t : {0.1, 1.0}) {
                const KernelParams kp{p, alpha, t};
                const auto f = semigroup_on_indicator(kp, Ball(zero(p), l), l + 6);
                // inside: int_{B_l} Z by shells plus the deep core
                double q = 0.0;
                double qb = 0.0;
                for (int k = l; k >= l - 60; --k) {
                    const auto z = kernel_Z(kp, k);
                    q += z.value * shell_volume(p, k);
                    qb += z.truncation_bound * shell_volume(p, k);
                }
                const auto z0 = kernel_Z(kp, std::nullopt);
                q += 0.5 * z0.value * real_power(p, l - 61);
                qb += 0.5 * (z0.value + z0.truncation_bound) * real_power(p, l - 61);
                double err = std::abs(q - f.value_at_zero().real());
                ok = ok && err <= qb + f.truncation_bound + 1e-14;
                worst = std::max(worst, err);
                for (int n = l + 1; n <= l + 6; ++n) {
                    const auto z = kernel_Z(kp, n);
                    err = std::abs(real_power(p, l) * z.value - f.shell_value(n).real());
                    ok = ok && err <= real_power(p, l) * z.truncation_bound + f.truncation_bound + 1e-15;
                    worst = std::max(worst, err);
                }
            }
        }
        r.checks.push_back({"indicator formula with a = 1 vs quadrature of Z * Delta_l", ok, fmt("max difference %.3g", worst)});
    }
    return r;
}

// ---------------------------------------------------------------- 5

CriterionReport criterion5() {
    CriterionReport r{5, "ball kernel: kernel path vs matrix exponential, c(t), mass", {}};
    const std::int64_t p = 2;
    const double alpha = 2.0;
    const GridSpec g(p, 1, 2);
    for (double t : {0.1, 0.5, 2.0}) {
        const KernelParams kp{p, alpha, t};
        const Eigen::MatrixXd E = ball_semigroup_matrix(kp, g);
        double worst = 0.0;
        for (std::size_t j = 0; j < g.dim(); ++j) {
            GridFunction e(g);
            e[j] = 1.0;
            const auto col = ball_semigroup_apply(kp, e);
            for (std::size_t i = 0; i < g.dim(); ++i) {
                worst = std::max(worst, std::abs(col[i].real() - E(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
            }
        }
        r.checks.push_back({fmt("kernel path vs exp(-t(A - lambda)) at t=%g", t), worst <= 1e-7, fmt("max entry difference %.3g", worst)});
    }
    {
        double lo = INFINITY;
        double hi = 0.0;
        double cross = 0.0;
        for (int e = 1; e <= 5; ++e) {
            const double t = std::pow(10.0, -e);
            const KernelParams kp{p, alpha, t};
            const double c = ball_constant_c(kp, 1).value;
            cross = std::max(cross, std::abs(c - ball_constant_c_from_mass(kp, 1)));
            lo = std::min(lo, std::abs(c) / (t * t));
            hi = std::max(hi, std::abs(c) / (t * t));
        }
        const double tiny = std::abs(ball_constant_c(KernelParams{p, alpha, 1e-8}, 1).value);
        r.checks.push_back({"c(0) = c'(0) = 0", hi <= 2.0 * lo && hi < 10.0 && tiny <= 1e-14 && cross <= 1e-12,
                            fmt("|c(t)|/t^2 in [%.6g, %.6g] for t in [1e-5, 0.1]; |c(1e-8)| %.3g; series vs mass identity %.3g", lo, hi, tiny, cross)});
    }
    for (int N : {0, 1}) {
        for (double t : {0.1, 0.5, 1.0, 5.0}) {
            const auto m = ball_kernel_mass(KernelParams{p, alpha, t}, N);
            r.checks.push_back({fmt("mass of Z_N, N=%d t=%g", N, t), std::abs(m.value - 1.0) <= 1e-8,
                                fmt("mass %.17g, certificate %.3g", m.value, m.truncation_bound)});
        }
    }
    return r;
}

// ---------------------------------------------------------------- 6

double h_accurate(double x) {
    // e^{-x} - 1 + x
    if (x < 0.1) {
        double term = x * x / 2.0;
        double s = 0.0;
        for (int n = 2; n < 40 && std::abs(term) > 1e-20 * std::abs(s); ++n) {
            s += term;
            term *= -x / (n + 1);
        }
        return s;
    }
    return std::expm1(-x) + x;
}

CriterionReport criterion6() {
    CriterionReport r{6, "first-order representation of c_{-k}(t)", {}};
    for (std::int64_t p : {2, 3}) {
        for (double alpha : {1.5, 2.0}) {
            const double C = remainder_constant(p, alpha);
            double C_emp = 0.0;
            bool ok = true;
            double rep_err = 0.0;
            for (int k = 1; k <= 20; ++k) {
                for (int i = 0; i < 40; ++i) {
                    const double t = 2.0 * std::pow(10.0, -6.0 * i / 39.0);
                    const double a = real_power(p, -k * alpha);
                    const double b = real_power(p, alpha) * a;
                    const double R = h_accurate(a * t) - h_accurate(b * t);
                    const auto split = first_order_split(p, alpha, k, t);
                    ok = ok && std::abs(R) <= split.remainder_bound * (1.0 + 1e-12);
                    C_emp = std::max(C_emp, std::abs(R) / (a * a * t * t));
                    const double c = coeff_ck(p, alpha, -k, t);
                    rep_err = std::max(rep_err, std::abs(split.linear + R - c) / c);
                }
            }
            ok = ok && rep_err <= 1e-13;
            r.checks.push_back({fmt("p=%d alpha=%.1f", static_cast<int>(p), alpha), ok,
                                fmt("C = %.6g, largest observed |remainder|/(p^{-2k alpha} t^2) = %.6g, representation error %.3g", C, C_emp, rep_err)});
        }
    }
    return r;
}

// ---------------------------------------------------------------- 7

CriterionReport criterion7() {
    CriterionReport r{7, "resolvent", {}};
    std::mt19937_64 rng(707);
    {
        double worst = 0.0;
        for (const GridSpec& g : {GridSpec(2, 1, 2), GridSpec(3, 1, 1), GridSpec(2, 2, 3)}) {
            for (double mu : {0.5, 1.0, 2.0}) {
                for (int n = 0; n < 5; ++n) {
                    const auto u = random_grid(rng, g, -1.0, 1.0);
                    const auto R = spectral_resolvent(g.p(), 2.0, mu, u);
                    const auto back = Complex(mu) * R + spectral_apply(OperatorParams{g.p(), 2.0, g}, R);
                    worst = std::max(worst, norms(back - u).linf);
                }
            }
        }
        r.checks.push_back({"spectral path (mu + A) R u = u", worst <= 1e-12, fmt("max residual %.3g", worst)});
    }
    {
        const GridSpec g(2, 1, 2);
        double worst = 0.0;
        double inv = 0.0;
        bool inv_ok = true;
        for (double mu : {0.5, 1.0, 2.0}) {
            const auto u = random_extended(rng, g, 20, -1.0, 1.0);
            const auto R = resolvent_apply(2, 2.0, mu, u);
            const auto L = laplace_resolvent(2, 2.0, mu, u);
            worst = std::max(worst, sup_diff(R, L));
            const OperatorParams op{2, 2.0, g};
            const auto A = ball_matrix(op);
            const auto back = Complex(mu) * R.core + restricted_apply(op, A, R);
            const double d = norms(back - u.core).linf;
            inv = std::max(inv, d);
            inv_ok = inv_ok && d <= 1e-8;
        }
        r.checks.push_back({"ball-average series vs Laplace quadrature of S(t)", worst <= 1e-5, fmt("max difference %.3g", worst)});
        r.checks.push_back({"whole-space inversion through the ball matrix and R_N", inv_ok, fmt("max residual %.3g", inv)});
    }
    {
        const GridSpec g(3, 1, 1);
        double neg = 0.0;
        double contr = -INFINITY;
        for (int n = 0; n < 50; ++n) {
            const double mu = std::exp(std::uniform_real_distribution<double>(std::log(0.1), std::log(10.0))(rng));
            const auto u = random_extended(rng, g, 10, 0.0, 1.0);
            const auto R = resolvent_apply(3, 2.0, mu, u);
            for (const auto& v : R.core.values()) {
                neg = std::min(neg, v.real());
            }
            for (const auto& v : R.exterior) {
                neg = std::min(neg, v.real());
            }
            contr = std::max(contr, mu * norms(R).l1 - norms(u).l1);
        }
        r.checks.push_back({"positivity and mu-contraction", neg >= -1e-15 && contr <= 1e-12,
                            fmt("min value %.3g, max mu||R u||_1 - ||u||_1 = %.3g", neg, contr)});
    }
    return r;
}

// ---------------------------------------------------------------- 8

CriterionReport criterion8() {
    CriterionReport r{8, "Green kernel and smoothness modulus", {}};
    const std::int64_t p = 2;
    const double alpha = 2.0;
    const double mu = 1.0;
    r.checks.push_back({"Phi(0) = 0", smoothness_modulus_Phi(p, alpha, mu, std::nullopt).value == 0.0, "exact"});
    {
        bool mono = true;
        double prev = 0.0;
        for (int rr = -25; rr <= 3; ++rr) {
            const double v = smoothness_modulus_Phi(p, alpha, mu, rr).value;
            mono = mono && v >= prev - 1e-15;
            prev = v;
        }
        r.checks.push_back({"Phi nondecreasing in |h|", mono, fmt("Phi(8) = %.6g", prev)});
    }
    {
        bool dec = true;
        double prev = INFINITY;
        double last = 0.0;
        for (int j = 1; j <= 20; ++j) {
            last = smoothness_modulus_Phi(p, alpha, mu, -j).value;
            dec = dec && last < prev;
            prev = last;
        }
        r.checks.push_back({"Phi(h) -> 0 along |h| = 2^-j", dec && last < 1e-4, fmt("Phi at j=20: %.3g", last)});
    }
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (int m = 8; m <= 16; ++m) {
            const double x = m * std::log(2.0);
            const double y = std::log(green_kernel_Emu(p, alpha, mu, m).value);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++n;
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        r.checks.push_back({"tail exponent of E_mu", std::abs(slope - (-alpha - 1.0)) < 0.05,
                            fmt("fitted slope %.6f, expected %.1f", slope, -alpha - 1.0)});
    }
    {
        bool threw = false;
        try {
            green_kernel_Emu(p, 0.5, mu, 0);
        } catch (const DomainError&) {
            threw = true;
        }
        r.checks.push_back({"alpha <= 1 rejected", threw, threw ? "domain error raised" : "no error"});
    }
    return r;
}

// ---------------------------------------------------------------- 9

CriterionReport criterion9() {
    CriterionReport r{9, "restriction identity on B_0", {}};
    const std::int64_t p = 2;
    const OperatorParams op{p, 2.0, GridSpec(p, 0, 3)};
    const GridSpec& g = *op.grid;
    const auto A = ball_matrix(op);
    auto ball = [&](std::uint64_t num, std::uint64_t den, int l) { return Ball(PAdicExpansion::from_rational(p, num, den), l); };
    const std::vector<std::pair<std::string, TestFunction>> cases = {
        {"Delta_1", TestFunction::indicator(ball(0, 1, 1))},
        {"Delta_2", TestFunction::indicator(ball(0, 1, 2))},
        {"Delta_0(x - 1/2)", TestFunction::indicator(ball(1, 2, 0))},
        {"Delta_-1(x - 3/2)", TestFunction::indicator(ball(3, 2, -1))},
        {"Delta_2(x - 1/8)", TestFunction::indicator(ball(1, 8, 2))},
        {"Delta_1 - 2 Delta_-1(x - 1)", TestFunction::indicator(ball(0, 1, 1)) - TestFunction::indicator(ball(1, 1, -1), 2.0)},
        {"Delta_2 + 3 Delta_-2(x - 1/4) + Delta_-3(x - 5)", TestFunction::indicator(ball(0, 1, 2))
                                                         + TestFunction::indicator(ball(1, 4, -2), 3.0)
                                                         + TestFunction::indicator(ball(5, 1, -3))},
    };
    for (const auto& [name, psi] : cases) {
        const auto [inside, outside] = split_at_ball(psi, 0);
        const GridFunction lhs_in = inside.empty() ? GridFunction(g) : A.apply(to_grid(inside, g));
        const Complex rn = exterior_constant_RN(op, outside, 0);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.dim(); ++i) {
            const Complex full = apply_to_test_function(op, psi, g.representative(i));
            worst = std::max(worst, std::abs(full - (lhs_in[i] + rn)));
        }
        r.checks.push_back({name, worst <= 1e-12, fmt("max |D psi - (D_0 psi_0 + R_0)| %.3g, R_0 = %.15g", worst, rn.real())});
    }
    return r;
}

// ---------------------------------------------------------------- 10

CriterionReport criterion10() {
    CriterionReport r{10, "nonlinear scheme", {}};
    const GridSpec g(2, 1, 2);
    std::mt19937_64 rng(1010);
    for (double m : {1.0, 2.0, 3.0}) {
        const PMESolver S(PMEProblem{2, 2.0, g, PhiSpec::power(m), 0.1, 1.0, {}});
        double v17 = -INFINITY, v18 = -INFINITY, v19 = -INFINITY, ident = 0.0;
        for (double eps : {0.0, 0.125}) {
            for (int n = 0; n < 100; ++n) {
                const auto f = random_grid(rng, g, -1.0, 1.0);
                const auto fh = random_grid(rng, g, -1.0, 1.0);
                const auto a = S.stationary_solve(f, eps);
                const auto b = S.stationary_solve(fh, eps);
                v17 = std::max(v17, norms(a.w).l1 - norms(f).l1);
                v18 = std::max(v18, norms(a.w - b.w).l1 - norms(f - fh).l1);
                v19 = std::max(v19, norms(a.beta_v).linf - norms(f).linf);
                const GridFunction lhs = f - S.matrix().apply(a.v) - Complex(eps) * a.v;
                ident = std::max(ident, std::abs(norms(lhs).linf - norms(a.beta_v).linf));
            }
        }
        r.checks.push_back({fmt("stationary inequalities, m=%g", m), v17 <= 1e-12 && v18 <= 1e-12 && v19 <= 1e-12 && ident <= 1e-12,
                            fmt("worst excess: |w|_1 %.3g, |w - w^|_1 %.3g, |beta(v)|_inf %.3g; sup-norm identity %.3g", v17, v18, v19, ident)});

        double contr = -INFINITY;
        double order = 0.0;
        std::uniform_real_distribution<double> pos(0.0, 0.5);
        for (int n = 0; n < 100; ++n) {
            const auto u = random_grid(rng, g, -1.0, 1.0);
            const auto uh = random_grid(rng, g, -1.0, 1.0);
            contr = std::max(contr, norms(S.implicit_step(u) - S.implicit_step(uh)).l1 - norms(u - uh).l1);
            GridFunction up = u;
            for (std::size_t i = 0; i < g.dim(); ++i) {
                up[i] += pos(rng);
            }
            const auto a = S.implicit_step(u);
            const auto b = S.implicit_step(up);
            for (std::size_t i = 0; i < g.dim(); ++i) {
                order = std::min(order, b[i].real() - a[i].real());
            }
        }
        r.checks.push_back({fmt("implicit step contraction and order, m=%g", m), contr <= 1e-12 && order >= -1e-12,
                            fmt("max ||step u - step u^||_1 - ||u - u^||_1 = %.3g, min ordered gap %.3g", contr, order)});
    }
    {
        const double tau = 0.1;
        const PMESolver S(PMEProblem{2, 2.0, g, PhiSpec::power(1.0), tau, 1.0, {}});
        const auto n = static_cast<Eigen::Index>(g.dim());
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(I + tau * S.matrix().entries);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const auto u = random_grid(rng, g, -1.0, 1.0);
            Eigen::VectorXd x(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                x(i) = u[static_cast<std::size_t>(i)].real();
            }
            const Eigen::VectorXd y = lu.solve(x);
            const auto s = S.implicit_step(u);
            for (Eigen::Index i = 0; i < n; ++i) {
                worst = std::max(worst, std::abs(s[static_cast<std::size_t>(i)].real() - y(i)));
            }
        }
        r.checks.push_back({"m = 1 is the linear resolvent", worst <= 1e-10, fmt("max difference %.3g", worst)});
    }
    {
        const PMESolver S(PMEProblem{2, 2.0, g, PhiSpec::power(2.0), 0.02, 0.5, {}});
        GridFunction u0(g);
        u0[0] = 1.0;
        u0[4] = 1.0;
        u0[3] = 0.5;
        const auto rep = S.refinement_ladder(u0, 3);
        bool ok = rep.orders.size() == 3;
        std::string detail = "differences";
        for (double d : rep.differences) {
            detail += fmt(" %.4g", d);
        }
        detail += "; orders";
        for (double o : rep.orders) {
            ok = ok && o >= 0.8;
            detail += fmt(" %.3f", o);
        }
        r.checks.push_back({"refinement ladder (m=2, tau=0.02 .. 0.00125)", ok, detail});
    }
    return r;
}

// ---------------------------------------------------------------- 11

CriterionReport criterion11() {
    CriterionReport r{11, "explicit solution", {}};
    const long double rho = rho_formula(2, 2.0, 2.0);
    const long double exact = -31.0L / 140.0L;
    r.checks.push_back({"rho(2, 2, 2) = -31/140", std::fabs(rho - exact) <= 1e-12L,
                        fmt("rho %.18Lf, |rho + 31/140| %.3Lg", rho, std::fabs(rho - exact))});
    {
        long double worst = 0.0L;
        int count = 0;
        for (std::int64_t p : {2, 3, 5, 7}) {
            for (double alpha : {0.5, 1.0, 2.0, 3.5}) {
                for (double m : {1.5, 2.0, 3.0, 4.0}) {
                    worst = std::max(worst, std::fabs(rho_identity_defect(p, alpha, m, rho_formula(p, alpha, m))));
                    ++count;
                }
            }
        }
        r.checks.push_back({fmt("rho identity on a %d-point lattice", count), worst <= 1e-12L, fmt("max defect %.3Lg", worst)});
    }
    {
        const auto s = ExplicitSolution::make(2, 2.0, 2.0, 1.0);
        const auto res = residual_check_explicit(s, 0.5, -10, 10);
        r.checks.push_back({"residual of the (t0 - t) solution, shells -10..10", res.max_residual <= 1e-10,
                            fmt("max residual %.3g at shell %d", res.max_residual, res.worst_shell)});
        const auto c = ExplicitSolution::make(2, 2.0, 2.0, 1.0, std::nullopt, true);
        const auto rc = residual_check_explicit(c, 0.5, -10, 10);
        r.checks.push_back({"residual of the (t0 + t) companion, shells -10..10", rc.max_residual <= 1e-10,
                            fmt("max residual %.3g at shell %d", rc.max_residual, rc.worst_shell)});
        const auto w = ExplicitSolution::make(2, 2.0, 2.0, 1.0, rho * 1.01L);
        const auto rw = residual_check_explicit(w, 0.5, -10, 10);
        r.checks.push_back({"1% perturbed rho is detected", rw.max_residual > 1e-4, fmt("max residual %.3g", rw.max_residual)});
    }
    return r;
}

} // namespace

CriterionReport run_criterion(int id) {
    try {
        switch (id) {
        case 1: return criterion1();
        case 2: return criterion2();
        case 3: return criterion3();
        case 4: return criterion4();
        case 5: return criterion5();
        case 6: return criterion6();
        case 7: return criterion7();
        case 8: return criterion8();
        case 9: return criterion9();
        case 10: return criterion10();
        case 11: return criterion11();
        default: throw PreconditionError("no criterion " + std::to_string(id));
        }
    } catch (const PreconditionError&) {
        throw;
    } catch (const std::exception& e) {
        return CriterionReport{id, "criterion " + std::to_string(id), {{"evaluation", false, std::string("exception: ") + e.what()}}};
    }
}

std::vector<std::string> suite_names() {
    return {"operator", "kernel", "semigroup", "solver", "explicit", "all"};
}

std::vector<int> suite_criteria(const std::string& suite) {
    if (suite == "operator") {
        return {1, 2, 9};
    }
    if (suite == "kernel") {
        return {3, 6, 8};
    }
    if (suite == "semigroup") {
        return {4, 5, 7};
    }
    if (suite == "solver") {
        return {10};
    }
    if (suite == "explicit") {
        return {11};
    }
    if (suite == "all") {
        std::vector<int> all;
        for (int i = 1; i <= kCriterionCount; ++i) {
            all.push_back(i);
        }
        return all;
    }
    throw PreconditionError("unknown suite '" + suite + "'");
}

} // namespace padic::verify
