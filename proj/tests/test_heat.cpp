#include <doctest.h>

#include "padic/errors.hpp"
#include "padic/heat.hpp"
#include "padic/vladimirov.hpp"

#include <random>

using namespace padic;

namespace {

Ball ball0(int l) {
    return Ball(PAdicExpansion(2), l);
}

} // namespace

TEST_CASE("coefficients c_k") {
    for (int k = -5; k <= 5; ++k) {
        CHECK(coeff_ck(2, 2.0, k, 0.0) == 0.0);
    }
    const double t = 0.7;
    double s = 0.0;
    for (int k = -30; k <= 30; ++k) {
        s += coeff_ck(2, 2.0, k, t);
    }
    const double closed = std::exp(-std::pow(2.0, -60.0) * t) - std::exp(-std::pow(2.0, 62.0) * t);
    CHECK(s == doctest::Approx(closed).epsilon(1e-14));
    CHECK(s == doctest::Approx(1.0).epsilon(1e-15));

    for (int k = 1; k <= 20; ++k) {
        for (double tt : {1e-6, 1e-3, 0.5, 2.0}) {
            const auto sp = first_order_split(2, 2.0, k, tt);
            CHECK(std::abs(coeff_ck(2, 2.0, -k, tt) - sp.linear) <= sp.remainder_bound * (1 + 1e-12) + 4e-16 * sp.linear);
        }
    }
}

TEST_CASE("heat kernel") {
    for (double t : {0.1, 1.0, 10.0}) {
        const KernelParams kp{2, 2.0, t};
        CHECK(heat_kernel_mass(kp, -40, 40).value == doctest::Approx(1.0).epsilon(1e-8));
        for (int k = -10; k <= 10; ++k) {
            CHECK(kernel_Z(kp, k).value > 0.0);
        }
        CHECK(kernel_Z(kp, std::nullopt).value > 0.0);
    }
    const KernelParams kp{2, 2.0, 1.0};
    const auto a = kernel_Z(kp, 1);
    const auto b = kernel_Z_alternating(kp, 1);
    CHECK(std::abs(a.value - b.value) <= 1e-9);
    CHECK(std::abs(a.value - b.value) <= a.truncation_bound + b.truncation_bound + 1e-15);
    CHECK_THROWS_AS(kernel_Z_alternating(kp, std::nullopt), DomainError);
    // the point evaluation agrees with the shell form
    CHECK(kernel_Z(kp, PAdicExpansion::from_rational(2, 1, 2)).value == kernel_Z(kp, 1).value);
    CHECK_THROWS(KernelParams{2, 2.0, -1.0}.validate());
}

TEST_CASE("semigroup on indicators") {
    const KernelParams kp{2, 2.0, 1.0};
    const ShellSums s(kp, -5, 10);
    CHECK(s.inside(0) - s.image(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

    for (int l : {-1, 0, 2}) {
        for (double t : {0.01, 1.0, 5.0}) {
            const auto f = semigroup_on_indicator(KernelParams{2, 2.0, t}, ball0(l), l + 40);
            CHECK(integral(f).real() == doctest::Approx(real_power(2, l)).epsilon(1e-10));
        }
    }
    const auto early = semigroup_on_indicator(KernelParams{2, 2.0, 1e-9}, ball0(0), 30);
    CHECK(early.value_at_zero().real() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(early.shell_value(1)) <= 1e-8);
}

TEST_CASE("semigroup laws on an extended grid function") {
    const GridSpec g(2, 1, 2);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    ExtendedGridFunction u(GridFunction(g), 30);
    for (std::size_t i = 0; i < g.dim(); ++i) {
        u.core[i] = U(rng);
    }
    u.exterior[0] = 0.5;
    u.exterior[3] = -0.25;
    const auto a = semigroup_apply(KernelParams{2, 2.0, 0.3}, semigroup_apply(KernelParams{2, 2.0, 0.4}, u));
    const auto b = semigroup_apply(KernelParams{2, 2.0, 0.7}, u);
    CHECK(norms(a - b).linf <= 1e-8);
    CHECK(norms(b).l1 <= norms(u).l1 + 1e-12);
}

TEST_CASE("ball kernel") {
    const GridSpec g(2, 1, 2);
    const KernelParams kp{2, 2.0, 0.5};
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
    CHECK(worst <= 1e-7);
    CHECK(ball_kernel_mass(kp, 1).value == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(ball_constant_c(kp, 1).value == doctest::Approx(ball_constant_c_from_mass(kp, 1)).epsilon(1e-10));
    CHECK(ball_kernel_lambda(kp, 1) == doctest::Approx(1.0 / 7).epsilon(1e-15));

    // positivity and the [0, 1] ceiling of e^{-lambda t} T_N
    GridFunction f(g);
    for (std::size_t i = 0; i < g.dim(); ++i) {
        f[i] = (i % 3 == 0) ? 1.0 : 0.25;
    }
    const auto Tf = ball_semigroup_apply(kp, f);
    for (std::size_t i = 0; i < g.dim(); ++i) {
        const double v = std::exp(-ball_kernel_lambda(kp, 1) * 0.5) * Tf[i].real();
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    CHECK(integral(Tf).real() == doctest::Approx(integral(f).real()).epsilon(1e-12));
}

TEST_CASE("resolvent") {
    const GridSpec g(2, 1, 2);
    GridFunction u(g);
    for (std::size_t i = 0; i < g.dim(); ++i) {
        u[i] = std::sin(1.0 + static_cast<double>(i));
    }
    const double mu = 0.8;
    const auto R = spectral_resolvent(2, 2.0, mu, u);
    const auto back = Complex(mu) * R + spectral_apply(OperatorParams{2, 2.0, g}, R);
    CHECK(norms(back - u).linf <= 1e-12);

    ExtendedGridFunction w(u, 15);
    w.exterior[1] = 0.3;
    const auto S = resolvent_apply(2, 2.0, mu, w);
    const auto L = laplace_resolvent(2, 2.0, mu, w);
    CHECK(norms(S - L).linf <= 1e-5);
}

TEST_CASE("Green kernel and smoothness modulus") {
    CHECK(smoothness_modulus_Phi(2, 2.0, 1.0, std::nullopt).value == 0.0);
    double prev = 0.0;
    for (int r = -12; r <= 2; ++r) {
        const double v = smoothness_modulus_Phi(2, 2.0, 1.0, r).value;
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(smoothness_modulus_Phi(2, 2.0, 1.0, -20).value < 1e-6);
    // E |x|^{alpha+1} levels off
    const double a = green_kernel_Emu(2, 2.0, 1.0, 14).value * std::pow(2.0, 42.0);
    const double b = green_kernel_Emu(2, 2.0, 1.0, 16).value * std::pow(2.0, 48.0);
    CHECK(a == doctest::Approx(b).epsilon(1e-3));
    CHECK_THROWS_AS(green_kernel_Emu(2, 1.0, 1.0, 0), DomainError);
}

TEST_CASE("matrix exponential") {
    Eigen::MatrixXd A(2, 2);
    A << 0.0, 1.0, -1.0, 0.0;
    const Eigen::MatrixXd E = expm(A);
    CHECK(E(0, 0) == doctest::Approx(std::cos(1.0)).epsilon(1e-14));
    CHECK(E(0, 1) == doctest::Approx(std::sin(1.0)).epsilon(1e-14));
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
    D(0, 0) = -30.0;
    D(1, 1) = 2.0;
    const Eigen::MatrixXd F = expm(D);
    CHECK(F(0, 0) == doctest::Approx(std::exp(-30.0)).epsilon(1e-12));
    CHECK(F(1, 1) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
}
