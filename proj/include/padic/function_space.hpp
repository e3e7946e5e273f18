#pragma once

#include "padic/padic_core.hpp"

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace padic {

using Complex = std::complex<double>;

struct Norms {
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
};

// ---------------------------------------------------------------- TestFunction

/// Finite combination of ball indicators: sum_i c_i * 1_{B_i}.
class TestFunction {
public:
    struct Term {
        Complex coefficient;
        Ball ball;
    };

    TestFunction() = default;
    explicit TestFunction(std::vector<Term> terms) : terms_(std::move(terms)) {}

    static TestFunction indicator(const Ball& b, Complex c = 1.0) { return TestFunction({{c, b}}); }

    const std::vector<Term>& terms() const noexcept { return terms_; }
    bool empty() const noexcept { return terms_.empty(); }

    /// Sum of the coefficients of all balls containing x.
    Complex operator()(const PAdicExpansion& x) const;

    /// Smallest radius exponent among the terms; nullopt when empty.
    std::optional<int> min_radius_exp() const;

    TestFunction& operator+=(const TestFunction& other);
    friend TestFunction operator+(TestFunction a, const TestFunction& b) { return a += b; }
    friend TestFunction operator-(TestFunction a, const TestFunction& b);
    friend TestFunction operator*(Complex s, TestFunction f);

private:
    std::vector<Term> terms_;
};

/// Disjoint balls of one common radius (the minimum present), no zero
/// coefficients, sorted. Pointwise values are unchanged.
TestFunction canonicalize(const TestFunction& f);

/// Canonical form refined to radius exponent `radius_exp` (must not exceed the
/// minimum radius of f).
TestFunction refine(const TestFunction& f, int radius_exp);

/// (1_{B(x0,k)} * 1_{B(x1,l)})(x) = p^{k+l-max(k,l)} 1_{B(x0+x1, max(k,l))}(x).
TestFunction convolve_indicators(const Ball& b1, const Ball& b2);

Norms norms(const TestFunction& f);
Complex integral(const TestFunction& f);

// ---------------------------------------------------------------- GridFunction

/// Values on the cosets of B_{-M} in B_N, in the index order of GridSpec.
class GridFunction {
public:
    explicit GridFunction(GridSpec grid);
    GridFunction(GridSpec grid, std::vector<Complex> values);

    static GridFunction constant(const GridSpec& grid, Complex c);
    static GridFunction from_real(const GridSpec& grid, std::span<const double> values);

    const GridSpec& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const Complex> values() const noexcept { return values_; }
    std::span<Complex> values() noexcept { return values_; }
    Complex& operator[](std::size_t i) { return values_[i]; }
    const Complex& operator[](std::size_t i) const { return values_[i]; }

    /// Real parts; throws DomainError if any imaginary part exceeds tol.
    std::vector<double> real_values(double tol = 0.0) const;

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(Complex s);
    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(Complex s, GridFunction a) { return a *= s; }

private:
    GridSpec grid_;
    std::vector<Complex> values_;
};

Norms norms(const GridFunction& u);
/// Haar integral: p^{-M} sum u_i.
Complex integral(const GridFunction& u);
/// Mean value over B_N.
Complex mean(const GridFunction& u);

/// Samples f on the coset representatives. Requires supp f in B_N and f
/// locally constant at radius p^{-M}; otherwise PrecisionError naming the ball.
GridFunction to_grid(const TestFunction& f, const GridSpec& g);
TestFunction from_grid(const GridFunction& u);

enum class FourierMethod { Direct, Fast };

/// (Fu)(xi_j) = p^{-M} sum_i chi(x_i xi_j) u(x_i), a function on the dual
/// grid (p, M, N).
GridFunction grid_fourier(const GridFunction& u, FourierMethod method = FourierMethod::Direct);
/// Inverse transform with the conjugate character and weight p^{-N}.
GridFunction inverse_grid_fourier(const GridFunction& U, FourierMethod method = FourierMethod::Direct);

/// Haar-weighted cyclic convolution on Z/p^{N+M}: p^{-M} sum_j u(x_i - x_j) v(x_j).
GridFunction grid_convolve(const GridFunction& u, const GridFunction& v);

/// u(. + h) for |h|_p <= p^N (digits of h at exponents >= M are absorbed).
/// (translate u)(x) = u(x + h)
GridFunction translate(const GridFunction& u, const PAdicExpansion& h);
GridFunction translate_by_index(const GridFunction& u, std::size_t shift);

/// max over |h|_p <= p^{-r} of ||u(. + h) - u||_1.
double modulus_of_continuity(const GridFunction& u, int r);

// ---------------------------------------------------------------- RadialFunction

/// value = coefficient * p^{k * exponent} on shells k > k_max.
struct PowerTail {
    Complex coefficient;
    double exponent;
};

/// A function of |x|_p. Stored shells cover [k_min, k_max]; every point with
/// |x|_p < p^{k_min} (including 0) takes value_at_zero; shells above k_max
/// follow the power tail when present and vanish otherwise.
class RadialFunction {
public:
    RadialFunction(std::int64_t p, int k_min, std::vector<Complex> shells, Complex value_at_zero,
                   std::optional<PowerTail> tail = std::nullopt);

    std::int64_t prime() const noexcept { return p_; }
    int k_min() const noexcept { return k_min_; }
    int k_max() const noexcept { return k_min_ + static_cast<int>(shells_.size()) - 1; }
    std::span<const Complex> shells() const noexcept { return shells_; }
    Complex value_at_zero() const noexcept { return zero_; }
    const std::optional<PowerTail>& tail() const noexcept { return tail_; }

    /// Value on the shell |x|_p = p^k.
    Complex shell_value(int k) const;
    Complex operator()(const PAdicExpansion& x) const;

    /// Certified bound on the error already carried by this representation
    /// (set by producers whose shells come from truncated series).
    double truncation_bound = 0.0;

private:
    std::int64_t p_;
    int k_min_;
    std::vector<Complex> shells_;
    Complex zero_;
    std::optional<PowerTail> tail_;
};

/// L1 includes the closed-form tail sum; throws DomainError when the tail is
/// not integrable (exponent >= -1).
Norms norms(const RadialFunction& f);
Complex integral(const RadialFunction& f);

// ---------------------------------------------------------------- ExtendedGridFunction

/// A function on Q_p given by grid values on B_N plus radial values on the
/// exterior shells |x|_p = p^{N+1}, ..., p^{N+K}; zero beyond. This is the
/// closure of grid functions under the whole-space heat semigroup and the
/// resolvent (their images are radial outside B_N).
struct ExtendedGridFunction {
    GridFunction core;
    std::vector<Complex> exterior;
    /// L1 mass dropped beyond the last stored shell.
    double truncation_bound = 0.0;

    explicit ExtendedGridFunction(GridFunction c, std::size_t shells = 0)
        : core(std::move(c)), exterior(shells, Complex{}) {}

    int outer_exp() const { return core.grid().N() + static_cast<int>(exterior.size()); }
    Complex exterior_value(int k) const;
    Complex operator()(const PAdicExpansion& x) const;
};

Norms norms(const ExtendedGridFunction& u);
Complex integral(const ExtendedGridFunction& u);
ExtendedGridFunction operator-(const ExtendedGridFunction& a, const ExtendedGridFunction& b);

} // namespace padic
