#include <doctest.h>

#include "padic/errors.hpp"
#include "padic/heat.hpp"
#include "padic/pme_solver.hpp"

#include <random>

using namespace padic;

namespace {

PMEProblem problem(double m, double tau, double t_end, const GridSpec& g = GridSpec(2, 1, 2)) {
    return PMEProblem{2, 2.0, g, PhiSpec::power(m), tau, t_end, {}};
}

GridFunction random_grid(std::mt19937_64& rng, const GridSpec& g, double lo, double hi) {
    std::uniform_real_distribution<double> U(lo, hi);
    GridFunction u(g);
    for (std::size_t i = 0; i < g.dim(); ++i) {
        u[i] = U(rng);
    }
    return u;
}

} // namespace

TEST_CASE("phi and beta") {
    for (double m : {1.0, 1.5, 2.0, 3.0}) {
        const auto phi = PhiSpec::power(m);
        for (double s : {-3.0, -0.7, -1e-3, 0.0, 2e-4, 0.5, 4.0}) {
            CHECK(phi.beta(phi.phi(s)) == doctest::Approx(s).epsilon(1e-12));
        }
        CHECK(phi.phi(0.0) == 0.0);
    }
    CHECK_THROWS_AS(PhiSpec::power(0.5), DomainError);

    const auto tab = PhiSpec::tabulated({-1.0, 0.0, 1.0, 2.0}, {-2.0, 0.0, 1.0, 3.0});
    CHECK(tab.phi(0.5) == doctest::Approx(0.5));
    CHECK(tab.phi(3.0) == doctest::Approx(5.0));
    CHECK(tab.beta(tab.phi(-1.7)) == doctest::Approx(-1.7));
    CHECK_THROWS(PhiSpec::tabulated({0.0, 1.0}, {0.0, 0.0}));
    CHECK_THROWS(PhiSpec::tabulated({0.5, 1.0}, {0.5, 1.0}));
}

TEST_CASE("stationary problem") {
    const PMESolver S(problem(2.0, 0.1, 1.0));
    const GridSpec& g = S.problem().grid;
    const auto zero = S.stationary_solve(GridFunction(g), 0.0);
    CHECK(norms(zero.v).linf == 0.0);
    CHECK(norms(zero.w).linf == 0.0);

    const PMESolver L(problem(1.0, 0.1, 1.0));
    const double lam = L.matrix().lambda;
    for (double eps : {0.0, 0.25}) {
        const auto r = L.stationary_solve(GridFunction::constant(g, 2.0), eps);
        for (std::size_t i = 0; i < g.dim(); ++i) {
            CHECK(r.v[i].real() == doctest::Approx(2.0 / (1.0 + eps + lam)).epsilon(1e-12));
        }
    }

    std::mt19937_64 rng(31);
    for (int n = 0; n < 100; ++n) {
        const auto f = random_grid(rng, g, -1.0, 1.0);
        const auto r = S.stationary_solve(f, 0.0);
        CHECK(norms(r.w).l1 <= norms(f).l1 + 1e-12);
        CHECK(norms(r.beta_v).linf <= norms(f).linf + 1e-12);
    }
}

TEST_CASE("implicit step") {
    const PMESolver L(problem(1.0, 0.2, 1.0));
    const GridSpec& g = L.problem().grid;
    CHECK(norms(L.implicit_step(GridFunction(g))).linf == 0.0);
    const auto c = L.implicit_step(GridFunction::constant(g, 3.0));
    for (std::size_t i = 0; i < g.dim(); ++i) {
        CHECK(c[i].real() == doctest::Approx(3.0 / (1.0 + 0.2 * L.matrix().lambda)).epsilon(1e-12));
    }

    const PMESolver S(problem(3.0, 0.2, 1.0));
    std::mt19937_64 rng(33);
    for (int n = 0; n < 100; ++n) {
        const auto u = random_grid(rng, g, -1.0, 1.0);
        const auto v = random_grid(rng, g, -1.0, 1.0);
        StepDiagnostics d;
        const auto su = S.implicit_step(u, &d);
        CHECK(norms(su - S.implicit_step(v)).l1 <= norms(u - v).l1 + 1e-12);
        CHECK(d.residual <= 1e-10);
        // the step inverts the forward map
        CHECK(norms(S.forward_map(su, 0.2) - u).linf <= 1e-10);
    }
}

TEST_CASE("linear evolution converges at first order") {
    const GridSpec g(2, 1, 2);
    GridFunction u0(g);
    u0[1] = 1.0;
    u0[5] = -0.5;
    const PMESolver base(problem(1.0, 0.1, 0.5));
    const auto& A = base.matrix().entries;
    const std::vector<double> raw = u0.real_values();
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(raw.data(), 8);
    const Eigen::VectorXd exact = expm(-0.5 * A) * x;
    std::vector<double> errs;
    for (double tau : {0.02, 0.01, 0.005}) {
        const auto r = PMESolver(problem(1.0, tau, 0.5)).evolve(u0);
        const auto& last = r.snapshots.back().second;
        double e = 0.0;
        for (std::size_t i = 0; i < g.dim(); ++i) {
            e = std::max(e, std::abs(last[i].real() - exact(static_cast<Eigen::Index>(i))));
        }
        errs.push_back(e);
    }
    CHECK(errs[0] / errs[1] == doctest::Approx(2.0).epsilon(0.15));
    CHECK(errs[1] / errs[2] == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("nonlinear evolution: order, ceiling, snapshots") {
    const GridSpec g(3, 1, 1);
    std::mt19937_64 rng(35);
    const auto u0 = random_grid(rng, g, -1.0, 1.0);
    GridFunction u1 = u0;
    for (std::size_t i = 0; i < g.dim(); ++i) {
        u1[i] += 0.1 * static_cast<double>(i % 2);
    }
    const PMESolver S(PMEProblem{3, 1.5, g, PhiSpec::power(2.0), 0.05, 0.5, {}});
    const auto a = S.evolve(u0, 2);
    const auto b = S.evolve(u1, 2);
    REQUIRE(a.snapshots.size() == b.snapshots.size());
    double prev = -1.0;
    for (std::size_t s = 0; s < a.snapshots.size(); ++s) {
        CHECK(a.snapshots[s].first > prev);
        prev = a.snapshots[s].first;
        for (std::size_t i = 0; i < g.dim(); ++i) {
            CHECK(b.snapshots[s].second[i].real() >= a.snapshots[s].second[i].real() - 1e-12);
        }
        CHECK(norms(a.snapshots[s].second).linf <= norms(u0).linf + 1e-12);
    }
    CHECK(a.diagnostics.size() == 10);
    CHECK(a.snapshots.back().first == doctest::Approx(0.5));
}

TEST_CASE("problem validation") {
    CHECK_THROWS(PMESolver(problem(2.0, 0.0, 1.0)));
    CHECK_THROWS(PMESolver(problem(2.0, 0.1, -1.0)));
}

TEST_CASE("explicit solution") {
    CHECK(static_cast<double>(rho_formula(2, 2.0, 2.0)) == doctest::Approx(-31.0 / 140).epsilon(1e-14));
    for (std::int64_t p : {2, 3, 5}) {
        for (double alpha : {0.5, 1.0, 2.0}) {
            for (double m : {1.5, 2.0, 3.0}) {
                CHECK(std::fabs(rho_identity_defect(p, alpha, m, rho_formula(p, alpha, m))) <= 1e-12L);
            }
        }
    }
    const auto s = ExplicitSolution::make(2, 2.0, 2.0, 1.0);
    CHECK(s.time_exponent() == -1.0);
    CHECK(residual_check_explicit(s, 0.5, -10, 10).max_residual <= 1e-10);
    const auto c = ExplicitSolution::make(2, 2.0, 2.0, 1.0, std::nullopt, true);
    CHECK(residual_check_explicit(c, 0.5, -10, 10).max_residual <= 1e-10);
    const auto w = ExplicitSolution::make(2, 2.0, 2.0, 1.0, rho_formula(2, 2.0, 2.0) * 1.01L);
    CHECK(residual_check_explicit(w, 0.5, -10, 10).max_residual > 1e-4);
    CHECK_THROWS(ExplicitSolution::make(2, 2.0, 1.0, 1.0));
}
