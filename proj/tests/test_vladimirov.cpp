#include <doctest.h>

#include "padic/errors.hpp"
#include "padic/vladimirov.hpp"

#include <random>

using namespace padic;

namespace {

const OperatorParams kP2{2, 2.0, std::nullopt};

Ball ball(std::uint64_t num, std::uint64_t den, int l) {
    return Ball(PAdicExpansion::from_rational(2, num, den), l);
}

} // namespace

TEST_CASE("indicator closed form") {
    const auto f = apply_to_indicator(kP2, ball(0, 1, 0));
    CHECK(f.value_at_zero().real() == doctest::Approx(4.0 / 7).epsilon(1e-15));
    CHECK(f.shell_value(1).real() == doctest::Approx(-3.0 / 7).epsilon(1e-15));
    CHECK(f.shell_value(2).real() == doctest::Approx(-3.0 / 56).epsilon(1e-15));
    CHECK(indicator_inside_value(2, 2.0, 0) == doctest::Approx(4.0 / 7).epsilon(1e-15));
    CHECK(std::abs(integral(f)) <= 1e-12);
    // recentred: the profile moves with the ball
    const Ball b = ball(1, 2, -1);
    const auto fb = apply_to_indicator(kP2, b);
    CHECK(apply_to_test_function(kP2, TestFunction::indicator(b), PAdicExpansion::from_rational(2, 1, 2)).real()
          == doctest::Approx(fb.value_at_zero().real()));
}

TEST_CASE("radial power rule") {
    const auto r = apply_radial_power(kP2, 4.0);
    CHECK(r.coefficient == doctest::Approx(140.0 / 31).epsilon(1e-14));
    CHECK(r.exponent == 2.0);
    CHECK(apply_radial_power(kP2, 0.0).coefficient == 0.0);
    CHECK_THROWS_AS(apply_radial_power(kP2, 2.0), DomainError);
}

TEST_CASE("hypersingular quadrature oracle") {
    const auto d0 = TestFunction::indicator(ball(0, 1, 0));
    auto q = hypersingular_quadrature(kP2, d0, PAdicExpansion(2), 40);
    CHECK(std::abs(q.value.real() - 4.0 / 7) <= q.tail_bound + 1e-15);
    CHECK(q.tail_bound <= 1e-8);
    q = hypersingular_quadrature(kP2, d0, PAdicExpansion::from_rational(2, 1, 2), 40);
    CHECK(std::abs(q.value.real() + 3.0 / 7) <= q.tail_bound + 1e-15);

    // a constant has no image: Delta_3 seen from inside B_0 out to shell 3
    const auto c = hypersingular_quadrature(kP2, TestFunction::indicator(ball(0, 1, 8)), PAdicExpansion(2), 8);
    CHECK(c.value == Complex(0.0));
}

TEST_CASE("ball matrix") {
    for (int M : {1, 2, 3}) {
        const GridSpec g(2, 0, M);
        const auto A = ball_matrix(OperatorParams{2, 2.0, g});
        CHECK(A.lambda == doctest::Approx(4.0 / 7).epsilon(1e-15));
        const auto one = A.apply(GridFunction::constant(g, 1.0));
        for (std::size_t i = 0; i < g.dim(); ++i) {
            CHECK(one[i].real() == doctest::Approx(4.0 / 7).epsilon(1e-13));
        }
        CHECK(A.entries == A.entries.transpose());
        for (Eigen::Index i = 0; i < A.entries.rows(); ++i) {
            CHECK(A.entries(i, i) > 0.0);
            for (Eigen::Index j = 0; j < A.entries.cols(); ++j) {
                if (i != j) {
                    CHECK(A.entries(i, j) < 0.0);
                }
            }
        }
    }
    CHECK(ball_lambda(2, 2.0, 1) == doctest::Approx(1.0 / 7).epsilon(1e-15));
    CHECK_THROWS(ball_matrix(OperatorParams{2, 2.0, std::nullopt}));
}

TEST_CASE("spectral form and its relation to the ball matrix") {
    const GridSpec g(2, 1, 2);
    const OperatorParams op{2, 2.0, g};
    CHECK(norms(spectral_apply(op, GridFunction::constant(g, 3.0))).linf <= 1e-14);

    // a character row is an eigenvector with eigenvalue |xi|^alpha
    const GridSpec dual = g.dual();
    for (std::size_t xi = 1; xi < dual.dim(); ++xi) {
        GridFunction row(g);
        for (std::size_t i = 0; i < g.dim(); ++i) {
            row[i] = character(dual.representative(xi) * g.representative(i)).value;
        }
        const double ev = real_power(2, 2.0 * *dual.abs_exp(xi));
        const auto out = spectral_apply(op, row);
        CHECK(norms(out - Complex(ev) * row).linf <= 1e-12);
    }

    const auto A = ball_matrix(op);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
        GridFunction u(g);
        for (std::size_t i = 0; i < g.dim(); ++i) {
            u[i] = U(rng);
        }
        GridFunction rhs = spectral_apply(op, u);
        const Complex lm = A.lambda * mean(u);
        for (auto& v : rhs.values()) {
            v += lm;
        }
        worst = std::max(worst, norms(A.apply(u) - rhs).linf);
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("exterior constant and the restriction identity") {
    CHECK(exterior_constant_RN(kP2, TestFunction{}, 0) == Complex(0.0));
    const auto shell = TestFunction::indicator(ball(0, 1, 1)) - TestFunction::indicator(ball(0, 1, 0));
    CHECK(exterior_constant_RN(kP2, shell, 0).real() == doctest::Approx(-3.0 / 7).epsilon(1e-14));
    CHECK_THROWS_AS(exterior_constant_RN(kP2, TestFunction::indicator(ball(0, 1, 0)), 0), PreconditionError);

    const OperatorParams op{2, 2.0, GridSpec(2, 0, 2)};
    const auto A = ball_matrix(op);
    const auto psi = TestFunction::indicator(ball(0, 1, 1));
    const auto [inside, outside] = split_at_ball(psi, 0);
    const auto lhs = A.apply(to_grid(inside, *op.grid));
    const Complex rn = exterior_constant_RN(op, outside, 0);
    for (std::size_t i = 0; i < op.grid->dim(); ++i) {
        CHECK(std::abs(apply_to_test_function(op, psi, op.grid->representative(i)) - (lhs[i] + rn)) <= 1e-12);
    }
}
