#pragma once

#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace padic {

bool is_prime(std::int64_t n);

// Throws PreconditionError unless p is a prime.
void require_prime(std::int64_t p);

/// Exact rational with 64-bit numerator/denominator; every operation checks
/// for overflow and throws std::overflow_error instead of wrapping.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d = 1);

    double to_double() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);
};

std::string to_string(const Rational& r);

/// p^k as an exact rational (k may be negative).
Rational rational_power(std::int64_t p, int k);

/// p^k as a double.
double real_power(std::int64_t p, double k);

/// A p-adic number with finitely many nonzero digits:
///   x = sum_j x_j p^j,  x_j in {0..p-1}.
/// These are exactly the nonnegative elements of Z[1/p]; the digit map is
/// kept canonical (no stored zeros) so equality of values is equality of maps.
class PAdicExpansion {
public:
    explicit PAdicExpansion(std::int64_t p);

    static PAdicExpansion from_digits(std::int64_t p, const std::map<int, int>& digits);
    static PAdicExpansion from_integer(std::int64_t p, std::uint64_t n);
    /// n * p^shift
    static PAdicExpansion from_scaled_integer(std::int64_t p, std::uint64_t n, int shift);
    /// num / den with den a power of p (e.g. 5/2 for p = 2).
    static PAdicExpansion from_rational(std::int64_t p, std::uint64_t num, std::uint64_t den);

    std::int64_t prime() const noexcept { return p_; }
    const std::map<int, int>& digits() const noexcept { return digits_; }
    int digit(int exponent) const;
    bool is_zero() const noexcept { return digits_.empty(); }

    /// Least exponent carrying a nonzero digit; nullopt for zero.
    std::optional<int> valuation() const;
    /// Greatest exponent carrying a nonzero digit; nullopt for zero.
    std::optional<int> top_exponent() const;

    /// Digits with exponent < e (the representative of x modulo p^e Z_p).
    PAdicExpansion truncated_below(int e) const;
    /// x * p^k
    PAdicExpansion shifted(int k) const;

    /// x - y; only defined when x >= y as rationals (otherwise the
    /// expansion does not terminate) and throws DomainError in that case.
    PAdicExpansion minus(const PAdicExpansion& y) const;

    /// Real value of the rational this expansion encodes.
    double to_double() const;
    /// Exact value as a rational (overflow-checked).
    Rational to_rational() const;

    /// "j:d,j:d" sorted by exponent; "0" encodes zero.
    std::string encode() const;
    static PAdicExpansion decode(std::int64_t p, std::string_view text);

    friend PAdicExpansion operator+(const PAdicExpansion& a, const PAdicExpansion& b);
    friend PAdicExpansion operator*(const PAdicExpansion& a, const PAdicExpansion& b);
    friend bool operator==(const PAdicExpansion& a, const PAdicExpansion& b) = default;

private:
    std::int64_t p_;
    std::map<int, int> digits_;

    void normalize_and_carry(std::map<int, std::int64_t> raw);
};

/// Valuation of x - y (least exponent where the digits differ); nullopt when x == y.
std::optional<int> difference_valuation(const PAdicExpansion& x, const PAdicExpansion& y);

/// |x|_p as an exact rational: p^{-v(x)}, or 0.
Rational abs_value(const PAdicExpansion& x);
/// |x - y|_p, exact.
Rational distance(const PAdicExpansion& x, const PAdicExpansion& y);

/// Sum of the digits at negative exponents, an exact rational in [0, 1).
Rational fractional_part(const PAdicExpansion& x);

struct CharacterValue {
    Rational turns;              // fractional part: chi = exp(2 pi i * turns)
    std::complex<double> value;  // quarter turns are returned exactly
};

/// The additive character chi(x) = exp(2 pi i {x}_p).
CharacterValue character(const PAdicExpansion& x);

/// exp(2 pi i num/den), exact at multiples of a quarter turn.
std::complex<double> unit_root(std::int64_t num, std::int64_t den);

/// Closed ball {x : |x - c|_p <= p^l}. Centers are stored canonically (digits
/// at exponents >= -l removed), so two Ball values compare equal exactly when
/// they are the same set.
class Ball {
public:
    Ball(PAdicExpansion center, int radius_exp);

    const PAdicExpansion& center() const noexcept { return center_; }
    int radius_exp() const noexcept { return radius_exp_; }
    std::int64_t prime() const noexcept { return center_.prime(); }

    bool contains(const PAdicExpansion& x) const;
    bool contains(const Ball& other) const;
    bool disjoint(const Ball& other) const;

    /// The p^{radius_exp - finer} sub-balls of radius p^{finer}.
    std::vector<Ball> refine(int finer_radius_exp) const;

    friend bool operator==(const Ball& a, const Ball& b) = default;
    friend bool operator<(const Ball& a, const Ball& b);

    std::string describe() const;

private:
    PAdicExpansion center_;
    int radius_exp_;
};

Rational haar_measure(const Ball& b);
/// Measure of the sphere {|x|_p = p^k}: p^k (1 - 1/p).
Rational shell_measure(std::int64_t p, int k);
/// Same as shell_measure, in floating point (no overflow for large |k|).
double shell_volume(std::int64_t p, int k);

/// Gamma_p(z) = (1 - p^{z-1}) / (1 - p^{-z}). Throws DomainError within
/// 1e-9 of the pole z = 0.
double gamma_p(std::int64_t p, double z);
/// Same in extended precision.
long double gamma_p_extended(std::int64_t p, long double z);

/// Uniform grid on B_N at resolution p^{-M}: the cosets of B_{-M} in B_N.
/// Coset i has representative sum_{j=-N}^{M-1} x_j p^j with i = sum x_j p^{j+N},
/// i.e. x_i = i / p^N, so the grid group is Z / p^{N+M}.
class GridSpec {
public:
    static constexpr std::size_t kDefaultCap = 4096;

    GridSpec(std::int64_t p, int N, int M, std::size_t cap = kDefaultCap);

    std::int64_t p() const noexcept { return p_; }
    int N() const noexcept { return N_; }
    int M() const noexcept { return M_; }
    std::size_t dim() const noexcept { return dim_; }

    /// Haar measure of one coset, p^{-M}.
    double cell_measure() const;
    /// Haar measure of B_N, p^N.
    double domain_measure() const;

    PAdicExpansion representative(std::size_t index) const;
    /// Coset index of x; x must lie in B_N.
    std::size_t index_of(const PAdicExpansion& x) const;

    /// Exponent k with |x_i - x_j|_p = p^k, or nullopt when i == j
    /// (the points share a coset).
    std::optional<int> distance_exp(std::size_t i, std::size_t j) const;
    /// Exponent of |x_i|_p, nullopt for the zero coset.
    std::optional<int> abs_exp(std::size_t i) const { return distance_exp(i, 0); }

    /// Grid of the Fourier dual group: (p, M, N).
    GridSpec dual() const { return GridSpec(p_, M_, N_, cap_); }

    /// (i + j) mod p^{N+M}: addition of representatives modulo B_{-M}.
    std::size_t add(std::size_t i, std::size_t j) const { return (i + j) % dim_; }

    friend bool operator==(const GridSpec& a, const GridSpec& b) {
        return a.p_ == b.p_ && a.N_ == b.N_ && a.M_ == b.M_;
    }

private:
    std::int64_t p_;
    int N_;
    int M_;
    std::size_t cap_;
    std::size_t dim_;
};

/// p-adic valuation of a positive integer.
int integer_valuation(std::int64_t p, std::uint64_t n);

} // namespace padic
