#include <doctest.h>

#include "padic/errors.hpp"
#include "padic/padic_core.hpp"

#include <random>

using namespace padic;

TEST_CASE("absolute value") {
    CHECK(abs_value(PAdicExpansion(2)) == Rational(0));
    CHECK(abs_value(PAdicExpansion::from_integer(2, 1)) == Rational(1));
    CHECK(abs_value(PAdicExpansion::from_integer(2, 12)) == Rational(1, 4));
    CHECK(abs_value(PAdicExpansion::from_rational(3, 1, 9)) == Rational(9));
}

TEST_CASE("fractional part") {
    CHECK(fractional_part(PAdicExpansion::from_rational(2, 5, 2)) == Rational(1, 2));
    CHECK(fractional_part(PAdicExpansion::from_integer(2, 12)) == Rational(0));
    CHECK(fractional_part(PAdicExpansion(5)) == Rational(0));
    CHECK(fractional_part(PAdicExpansion::from_rational(2, 3, 4)) == Rational(3, 4));
}

TEST_CASE("additive character") {
    CHECK(character(PAdicExpansion::from_integer(3, 7)).value == std::complex<double>(1.0, 0.0));
    CHECK(character(PAdicExpansion::from_rational(2, 1, 2)).value == std::complex<double>(-1.0, 0.0));
    CHECK(character(PAdicExpansion::from_rational(2, 3, 4)).value == std::complex<double>(0.0, -1.0));
}

TEST_CASE("haar measure of balls and shells") {
    CHECK(haar_measure(Ball(PAdicExpansion(2), 0)) == Rational(1));
    CHECK(haar_measure(Ball(PAdicExpansion(2), 3)) == Rational(8));
    CHECK(shell_measure(2, 1) == Rational(1));
    CHECK(shell_measure(3, 0) == Rational(2, 3));
    // the shell |x| = 2 holds exactly half of the 4 cosets of radius 1/2 in B_1
    const GridSpec g(2, 1, 1);
    int on_shell = 0;
    for (std::size_t i = 0; i < g.dim(); ++i) {
        on_shell += g.abs_exp(i) == 1;
    }
    CHECK(on_shell * g.cell_measure() == doctest::Approx(shell_measure(2, 1).to_double()));
}

TEST_CASE("gamma factor") {
    CHECK(gamma_p(2, 3.0) == doctest::Approx(-24.0 / 7).epsilon(1e-15));
    CHECK(gamma_p(2, 5.0) == doctest::Approx(-480.0 / 31).epsilon(1e-15));
    CHECK(gamma_p(3, 1.0) == 0.0);
    CHECK(gamma_p(7, 1.0) == 0.0);
    CHECK_THROWS_AS(gamma_p(2, 0.0), DomainError);
}

TEST_CASE("expansion encoding round trip") {
    // 5/2 = 2^-1 + 2
    const auto x = PAdicExpansion::from_rational(2, 5, 2);
    CHECK(x.encode() == "-1:1,1:1");
    CHECK(PAdicExpansion::decode(2, "-1:1,1:1") == x);
    CHECK(PAdicExpansion::decode(2, "-1:1,2:1") == PAdicExpansion::from_rational(2, 9, 2));
    CHECK(PAdicExpansion(2).encode() == "0");
    CHECK(PAdicExpansion::decode(2, "0").is_zero());
    CHECK_THROWS(PAdicExpansion::decode(2, "0:2"));
    CHECK_THROWS(PAdicExpansion::decode(3, "1:1,0:1"));

    std::mt19937_64 rng(7);
    for (std::int64_t p : {2, 3, 5, 7}) {
        std::uniform_int_distribution<int> d(0, static_cast<int>(p) - 1);
        for (int n = 0; n < 50; ++n) {
            std::map<int, int> digits;
            for (int j = -6; j <= 6; ++j) {
                digits[j] = d(rng);
            }
            const auto y = PAdicExpansion::from_digits(p, digits);
            CHECK(PAdicExpansion::decode(p, y.encode()) == y);
        }
    }
}

TEST_CASE("arithmetic with carries") {
    const auto a = PAdicExpansion::from_integer(2, 7);
    const auto b = PAdicExpansion::from_integer(2, 9);
    CHECK((a + b) == PAdicExpansion::from_integer(2, 16));
    CHECK((a * b) == PAdicExpansion::from_integer(2, 63));
    CHECK(b.minus(a) == PAdicExpansion::from_integer(2, 2));
    CHECK((PAdicExpansion::from_rational(3, 1, 3) + PAdicExpansion::from_rational(3, 2, 3)) == PAdicExpansion::from_integer(3, 1));
}

TEST_CASE("ball equality and refinement") {
    const Ball b(PAdicExpansion(2), 1);
    CHECK(b == Ball(PAdicExpansion::from_integer(2, 1), 1));
    CHECK_FALSE(b == Ball(PAdicExpansion::from_integer(2, 1), 0));
    const auto kids = b.refine(0);
    REQUIRE(kids.size() == 2);
    CHECK(kids[0].disjoint(kids[1]));
    CHECK(b.contains(kids[1]));
    CHECK(b.refine(-2).size() == 8);
}

TEST_CASE("grid representatives follow the integer order") {
    const GridSpec g(2, 1, 1);
    REQUIRE(g.dim() == 4);
    CHECK(g.representative(0).is_zero());
    CHECK(g.representative(1) == PAdicExpansion::from_rational(2, 1, 2));
    CHECK(g.representative(2) == PAdicExpansion::from_integer(2, 1));
    CHECK(g.representative(3) == PAdicExpansion::from_rational(2, 3, 2));
    for (std::size_t i = 0; i < g.dim(); ++i) {
        CHECK(g.index_of(g.representative(i)) == i);
    }
    const GridSpec h(3, 2, 1);
    for (std::size_t i = 0; i < h.dim(); ++i) {
        for (std::size_t j = 0; j < h.dim(); ++j) {
            CHECK(h.index_of(h.representative(i) + h.representative(j)) == h.add(i, j));
        }
    }
    CHECK(g.dual() == GridSpec(2, 1, 1));
    CHECK_THROWS(GridSpec(2, 0, 0));
    CHECK_THROWS(GridSpec(2, 10, 10));
}
