#include <doctest.h>

#include "padic/errors.hpp"
#include "padic/function_space.hpp"

#include <random>

using namespace padic;

namespace {

Ball ball(std::int64_t p, std::uint64_t num, std::uint64_t den, int l) {
    return Ball(PAdicExpansion::from_rational(p, num, den), l);
}

GridFunction random_grid(std::mt19937_64& rng, const GridSpec& g) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    GridFunction u(g);
    for (std::size_t i = 0; i < g.dim(); ++i) {
        u[i] = Complex(U(rng), U(rng));
    }
    return u;
}

double sup(const GridFunction& a, const GridFunction& b) {
    return norms(a - b).linf;
}

} // namespace

TEST_CASE("canonical form") {
    const auto d1 = TestFunction::indicator(ball(2, 0, 1, 1));
    const auto c = refine(d1, 0);
    REQUIRE(c.terms().size() == 2);
    for (const auto& t : c.terms()) {
        CHECK(t.coefficient == Complex(1.0));
        CHECK(t.ball.radius_exp() == 0);
    }
    CHECK(canonicalize(d1 - d1).empty());

    const auto f = TestFunction::indicator(ball(2, 0, 1, 0)) + d1;
    const auto cf = canonicalize(f);
    CHECK(cf.terms().size() == 2);
    CHECK(cf(PAdicExpansion(2)) == Complex(2.0));
    CHECK(cf(PAdicExpansion::from_integer(2, 1)) == Complex(2.0));
    CHECK(cf(PAdicExpansion::from_rational(2, 1, 2)) == Complex(1.0));
    CHECK(cf(PAdicExpansion::from_rational(2, 1, 4)) == Complex(0.0));
}

TEST_CASE("sampling on the grid") {
    const GridSpec g(2, 1, 1);
    const auto u = to_grid(TestFunction::indicator(ball(2, 0, 1, 0)), g);
    CHECK(u[0] == Complex(1.0));
    CHECK(u[1] == Complex(0.0));
    CHECK(u[2] == Complex(1.0));
    CHECK(u[3] == Complex(0.0));
    CHECK(norms(to_grid(TestFunction{}, g)).linf == 0.0);
    CHECK_THROWS_AS(to_grid(TestFunction::indicator(ball(2, 0, 1, -2)), g), PrecisionError);
    CHECK_THROWS_AS(to_grid(TestFunction::indicator(ball(2, 0, 1, 2)), g), PrecisionError);

    std::mt19937_64 rng(3);
    const auto v = random_grid(rng, GridSpec(3, 1, 1));
    CHECK(sup(to_grid(from_grid(v), v.grid()), v) == 0.0);
}

TEST_CASE("convolution of indicators") {
    auto check = [](const Ball& a, const Ball& b, double coeff, int radius) {
        const auto c = convolve_indicators(a, b);
        REQUIRE(c.terms().size() == 1);
        CHECK(c.terms()[0].coefficient.real() == doctest::Approx(coeff).epsilon(1e-15));
        CHECK(c.terms()[0].ball.radius_exp() == radius);
    };
    check(ball(2, 0, 1, 0), ball(2, 0, 1, 0), 1.0, 0);
    check(ball(2, 0, 1, 1), ball(2, 0, 1, 0), 1.0, 1);
    check(ball(2, 0, 1, -1), ball(2, 0, 1, -1), 0.5, -1);

    // against the Haar-weighted grid convolution
    const GridSpec g(2, 2, 2);
    const Ball a = ball(2, 1, 2, -1);
    const Ball b = ball(2, 3, 4, -2);
    const auto direct = to_grid(convolve_indicators(a, b), g);
    const auto cyc = grid_convolve(to_grid(TestFunction::indicator(a), g), to_grid(TestFunction::indicator(b), g));
    CHECK(sup(direct, cyc) <= 1e-12);
}

TEST_CASE("grid Fourier transform") {
    const GridSpec g(2, 1, 1);
    const auto F0 = grid_fourier(to_grid(TestFunction::indicator(ball(2, 0, 1, 0)), g));
    CHECK(sup(F0, to_grid(TestFunction::indicator(ball(2, 0, 1, 0)), g.dual())) <= 1e-15);

    const auto F1 = grid_fourier(to_grid(TestFunction::indicator(ball(2, 0, 1, 1)), g));
    CHECK(sup(F1, to_grid(TestFunction::indicator(ball(2, 0, 1, -1), 2.0), g.dual())) <= 1e-15);

    CHECK(norms(grid_fourier(GridFunction(g))).linf == 0.0);

    std::mt19937_64 rng(11);
    for (const GridSpec& h : {GridSpec(2, 2, 3), GridSpec(3, 1, 2), GridSpec(5, 1, 1)}) {
        const auto u = random_grid(rng, h);
        const auto v = random_grid(rng, h);
        const auto fast = grid_fourier(u, FourierMethod::Fast);
        CHECK(sup(fast, grid_fourier(u, FourierMethod::Direct)) <= 1e-12);
        CHECK(sup(inverse_grid_fourier(fast, FourierMethod::Fast), u) <= 1e-12);
        // Plancherel
        CHECK(norms(fast).l2 == doctest::Approx(norms(u).l2).epsilon(1e-12));
        // convolution theorem with factor 1
        const auto lhs = grid_fourier(grid_convolve(u, v));
        GridFunction rhs = grid_fourier(u);
        const auto fv = grid_fourier(v);
        for (std::size_t i = 0; i < h.dim(); ++i) {
            rhs[i] *= fv[i];
        }
        CHECK(sup(lhs, rhs) <= 1e-12);
    }
}

TEST_CASE("norms") {
    CHECK(norms(TestFunction::indicator(ball(2, 0, 1, 0))).l1 == 1.0);
    const RadialFunction r(2, 1, {}, 0.0, PowerTail{1.0, -3.0});
    CHECK(norms(r).l1 == doctest::Approx(1.0 / 6).epsilon(1e-14));
    double partial = 0.0;
    for (int k = 1; k <= 30; ++k) {
        partial += shell_volume(2, k) * std::pow(2.0, -3.0 * k);
    }
    CHECK(partial == doctest::Approx(1.0 / 6).epsilon(1e-9));
    CHECK_THROWS_AS(norms(RadialFunction(2, 1, {}, 0.0, PowerTail{1.0, -1.0})), DomainError);

    std::mt19937_64 rng(5);
    const auto u = random_grid(rng, GridSpec(3, 1, 1));
    const Norms a = norms(u);
    const Norms b = norms(Complex(-2.5) * u);
    CHECK(b.l1 == doctest::Approx(2.5 * a.l1));
    CHECK(b.l2 == doctest::Approx(2.5 * a.l2));
    CHECK(b.linf == doctest::Approx(2.5 * a.linf));
}

TEST_CASE("translation and modulus of continuity") {
    const GridSpec g(2, 1, 2);
    std::mt19937_64 rng(9);
    const auto u = random_grid(rng, g);
    CHECK(sup(translate(u, PAdicExpansion::from_integer(2, 4)), u) == 0.0);

    const auto cell = to_grid(TestFunction::indicator(ball(2, 0, 1, -2)), g);
    const auto moved = translate(cell, PAdicExpansion::from_integer(2, 1));
    // (translate u)(x) = u(x + h): the cell moves to -1, which is 3 mod 4
    const auto expect = to_grid(TestFunction::indicator(ball(2, 3, 1, -2)), g);
    CHECK(sup(moved, expect) == 0.0);

    CHECK(modulus_of_continuity(u, g.M()) == 0.0);
    CHECK(modulus_of_continuity(u, g.M() - 1) > 0.0);
}
