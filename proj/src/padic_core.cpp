#include "padic/padic_core.hpp"

#include "padic/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace padic {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw std::overflow_error("rational arithmetic overflow");
    }
    return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) {
        throw std::overflow_error("rational arithmetic overflow");
    }
    return r;
}

std::int64_t checked_pow(std::int64_t p, int k) {
    std::int64_t r = 1;
    for (int i = 0; i < k; ++i) {
        r = checked_mul(r, p);
    }
    return r;
}

} // namespace

bool is_prime(std::int64_t n) {
    if (n < 2) {
        return false;
    }
    for (std::int64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            return false;
        }
    }
    return true;
}

void require_prime(std::int64_t p) {
    if (!is_prime(p)) {
        throw PreconditionError("p = " + std::to_string(p) + " is not a prime");
    }
}

// ---------------------------------------------------------------- Rational

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (d == 0) {
        throw std::domain_error("rational with zero denominator");
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

Rational operator+(const Rational& a, const Rational& b) {
    const std::int64_t g = std::gcd(a.den, b.den);
    const std::int64_t l = checked_mul(a.den / g, b.den);
    return Rational(checked_add(checked_mul(a.num, l / a.den), checked_mul(b.num, l / b.den)), l);
}

Rational operator-(const Rational& a, const Rational& b) {
    return a + Rational(-b.num, b.den);
}

Rational operator*(const Rational& a, const Rational& b) {
    const Rational x(a.num, b.den);
    const Rational y(b.num, a.den);
    return Rational(checked_mul(x.num, y.num), checked_mul(x.den, y.den));
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const __int128 lhs = static_cast<__int128>(a.num) * b.den;
    const __int128 rhs = static_cast<__int128>(b.num) * a.den;
    if (lhs < rhs) {
        return std::strong_ordering::less;
    }
    if (lhs > rhs) {
        return std::strong_ordering::greater;
    }
    return std::strong_ordering::equal;
}

std::string to_string(const Rational& r) {
    if (r.den == 1) {
        return std::to_string(r.num);
    }
    return std::to_string(r.num) + "/" + std::to_string(r.den);
}

Rational rational_power(std::int64_t p, int k) {
    if (k >= 0) {
        return Rational(checked_pow(p, k));
    }
    return Rational(1, checked_pow(p, -k));
}

double real_power(std::int64_t p, double k) {
    return std::pow(static_cast<double>(p), k);
}

// ---------------------------------------------------------------- PAdicExpansion

PAdicExpansion::PAdicExpansion(std::int64_t p) : p_(p) {
    require_prime(p);
}

PAdicExpansion PAdicExpansion::from_digits(std::int64_t p, const std::map<int, int>& digits) {
    PAdicExpansion x(p);
    for (const auto& [j, d] : digits) {
        if (d < 0 || d >= p) {
            throw PreconditionError("digit " + std::to_string(d) + " at exponent " + std::to_string(j)
                                    + " outside {0.." + std::to_string(p - 1) + "}");
        }
        if (d != 0) {
            x.digits_.emplace(j, d);
        }
    }
    return x;
}

PAdicExpansion PAdicExpansion::from_integer(std::int64_t p, std::uint64_t n) {
    return from_scaled_integer(p, n, 0);
}

PAdicExpansion PAdicExpansion::from_scaled_integer(std::int64_t p, std::uint64_t n, int shift) {
    PAdicExpansion x(p);
    const auto up = static_cast<std::uint64_t>(p);
    for (int j = shift; n != 0; ++j) {
        const auto d = static_cast<int>(n % up);
        if (d != 0) {
            x.digits_.emplace(j, d);
        }
        n /= up;
    }
    return x;
}

PAdicExpansion PAdicExpansion::from_rational(std::int64_t p, std::uint64_t num, std::uint64_t den) {
    require_prime(p);
    if (den == 0) {
        throw std::domain_error("zero denominator");
    }
    int shift = 0;
    const auto up = static_cast<std::uint64_t>(p);
    while (den % up == 0) {
        den /= up;
        --shift;
    }
    if (den != 1) {
        throw DomainError("denominator is not a power of p; expansion would not terminate");
    }
    return from_scaled_integer(p, num, shift);
}

int PAdicExpansion::digit(int exponent) const {
    const auto it = digits_.find(exponent);
    return it == digits_.end() ? 0 : it->second;
}

std::optional<int> PAdicExpansion::valuation() const {
    if (digits_.empty()) {
        return std::nullopt;
    }
    return digits_.begin()->first;
}

std::optional<int> PAdicExpansion::top_exponent() const {
    if (digits_.empty()) {
        return std::nullopt;
    }
    return digits_.rbegin()->first;
}

PAdicExpansion PAdicExpansion::truncated_below(int e) const {
    PAdicExpansion r(p_);
    for (const auto& [j, d] : digits_) {
        if (j >= e) {
            break;
        }
        r.digits_.emplace(j, d);
    }
    return r;
}

PAdicExpansion PAdicExpansion::shifted(int k) const {
    PAdicExpansion r(p_);
    for (const auto& [j, d] : digits_) {
        r.digits_.emplace(j + k, d);
    }
    return r;
}

void PAdicExpansion::normalize_and_carry(std::map<int, std::int64_t> raw) {
    digits_.clear();
    std::int64_t carry = 0;
    auto it = raw.begin();
    if (it == raw.end()) {
        return;
    }
    int j = it->first;
    while (it != raw.end() || carry != 0) {
        std::int64_t v = carry;
        if (it != raw.end() && it->first == j) {
            v += it->second;
            ++it;
        }
        const std::int64_t d = v % p_;
        carry = v / p_;
        if (d != 0) {
            digits_.emplace(j, static_cast<int>(d));
        }
        if (carry == 0 && it != raw.end()) {
            j = it->first;
        } else {
            ++j;
        }
    }
}

PAdicExpansion operator+(const PAdicExpansion& a, const PAdicExpansion& b) {
    if (a.p_ != b.p_) {
        throw PreconditionError("adding expansions with different primes");
    }
    std::map<int, std::int64_t> raw;
    for (const auto& [j, d] : a.digits_) {
        raw[j] += d;
    }
    for (const auto& [j, d] : b.digits_) {
        raw[j] += d;
    }
    PAdicExpansion r(a.p_);
    r.normalize_and_carry(std::move(raw));
    return r;
}

PAdicExpansion operator*(const PAdicExpansion& a, const PAdicExpansion& b) {
    if (a.p_ != b.p_) {
        throw PreconditionError("multiplying expansions with different primes");
    }
    std::map<int, std::int64_t> raw;
    for (const auto& [i, di] : a.digits_) {
        for (const auto& [j, dj] : b.digits_) {
            raw[i + j] += static_cast<std::int64_t>(di) * dj;
        }
    }
    PAdicExpansion r(a.p_);
    r.normalize_and_carry(std::move(raw));
    return r;
}

PAdicExpansion PAdicExpansion::minus(const PAdicExpansion& y) const {
    if (p_ != y.p_) {
        throw PreconditionError("subtracting expansions with different primes");
    }
    if (y.is_zero()) {
        return *this;
    }
    const int lo = std::min(valuation().value_or(*y.valuation()), *y.valuation());
    const int hi = std::max(top_exponent().value_or(*y.top_exponent()), *y.top_exponent());
    PAdicExpansion r(p_);
    int borrow = 0;
    for (int j = lo; j <= hi; ++j) {
        int d = digit(j) - y.digit(j) - borrow;
        borrow = 0;
        if (d < 0) {
            d += static_cast<int>(p_);
            borrow = 1;
        }
        if (d != 0) {
            r.digits_.emplace(j, d);
        }
    }
    if (borrow != 0) {
        throw DomainError("difference " + encode() + " - " + y.encode()
                          + " is negative and has no terminating expansion");
    }
    return r;
}

double PAdicExpansion::to_double() const {
    double s = 0.0;
    for (const auto& [j, d] : digits_) {
        s += d * real_power(p_, j);
    }
    return s;
}

Rational PAdicExpansion::to_rational() const {
    Rational s(0);
    for (const auto& [j, d] : digits_) {
        s = s + Rational(d) * rational_power(p_, j);
    }
    return s;
}

std::string PAdicExpansion::encode() const {
    if (digits_.empty()) {
        return "0";
    }
    std::string out;
    for (const auto& [j, d] : digits_) {
        if (!out.empty()) {
            out += ',';
        }
        out += std::to_string(j);
        out += ':';
        out += std::to_string(d);
    }
    return out;
}

PAdicExpansion PAdicExpansion::decode(std::int64_t p, std::string_view text) {
    PAdicExpansion x(p);
    if (text == "0") {
        return x;
    }
    auto fail = [&](const std::string& why) {
        return PreconditionError("bad expansion \"" + std::string(text) + "\": " + why);
    };
    if (text.empty()) {
        throw fail("empty");
    }
    std::optional<int> last;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find(',', pos), text.size());
        const std::string_view item = text.substr(pos, end - pos);
        const std::size_t colon = item.find(':');
        if (colon == std::string_view::npos) {
            throw fail("missing ':'");
        }
        int j = 0;
        int d = 0;
        const auto r1 = std::from_chars(item.data(), item.data() + colon, j);
        const auto r2 = std::from_chars(item.data() + colon + 1, item.data() + item.size(), d);
        if (r1.ec != std::errc{} || r1.ptr != item.data() + colon || r2.ec != std::errc{}
            || r2.ptr != item.data() + item.size()) {
            throw fail("malformed term '" + std::string(item) + "'");
        }
        if (d <= 0 || d >= p) {
            throw fail("digit out of range or zero");
        }
        if (last && j <= *last) {
            throw fail("exponents must be strictly increasing");
        }
        last = j;
        x.digits_.emplace(j, d);
        if (end == text.size()) {
            break;
        }
        pos = end + 1;
    }
    return x;
}

std::optional<int> difference_valuation(const PAdicExpansion& x, const PAdicExpansion& y) {
    auto ix = x.digits().begin();
    auto iy = y.digits().begin();
    const auto ex = x.digits().end();
    const auto ey = y.digits().end();
    while (ix != ex || iy != ey) {
        if (iy == ey || (ix != ex && ix->first < iy->first)) {
            return ix->first;
        }
        if (ix == ex || iy->first < ix->first) {
            return iy->first;
        }
        if (ix->second != iy->second) {
            return ix->first;
        }
        ++ix;
        ++iy;
    }
    return std::nullopt;
}

Rational abs_value(const PAdicExpansion& x) {
    const auto v = x.valuation();
    return v ? rational_power(x.prime(), -*v) : Rational(0);
}

Rational distance(const PAdicExpansion& x, const PAdicExpansion& y) {
    const auto v = difference_valuation(x, y);
    return v ? rational_power(x.prime(), -*v) : Rational(0);
}

Rational fractional_part(const PAdicExpansion& x) {
    return x.truncated_below(0).to_rational();
}

std::complex<double> unit_root(std::int64_t num, std::int64_t den) {
    std::int64_t n = num % den;
    if (n < 0) {
        n += den;
    }
    const __int128 four_n = static_cast<__int128>(4) * n;
    if (four_n % den == 0) {
        switch (static_cast<int>(four_n / den)) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
        }
    }
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(den);
    return {std::cos(angle), std::sin(angle)};
}

CharacterValue character(const PAdicExpansion& x) {
    const Rational f = fractional_part(x);
    return {f, unit_root(f.num, f.den)};
}

// ---------------------------------------------------------------- Ball

Ball::Ball(PAdicExpansion center, int radius_exp)
    : center_(center.truncated_below(-radius_exp)), radius_exp_(radius_exp) {}

bool Ball::contains(const PAdicExpansion& x) const {
    if (x.prime() != prime()) {
        throw PreconditionError("ball and point use different primes");
    }
    return x.truncated_below(-radius_exp_) == center_;
}

bool Ball::contains(const Ball& other) const {
    return other.radius_exp_ <= radius_exp_ && contains(other.center_);
}

bool Ball::disjoint(const Ball& other) const {
    return !contains(other) && !other.contains(*this);
}

std::vector<Ball> Ball::refine(int finer_radius_exp) const {
    if (finer_radius_exp > radius_exp_) {
        throw PreconditionError("refine target radius exceeds ball radius");
    }
    const int levels = radius_exp_ - finer_radius_exp;
    const double count = std::pow(static_cast<double>(prime()), levels);
    if (count > 1 << 22) {
        throw ResourceError("refining " + describe() + " to radius exponent " + std::to_string(finer_radius_exp)
                            + " needs too many balls");
    }
    std::vector<Ball> out;
    out.reserve(static_cast<std::size_t>(count));
    const auto n = static_cast<std::uint64_t>(count);
    for (std::uint64_t i = 0; i < n; ++i) {
        // digits at exponents -radius_exp .. -finer-1
        out.emplace_back(center_ + PAdicExpansion::from_scaled_integer(prime(), i, -radius_exp_), finer_radius_exp);
    }
    return out;
}

bool operator<(const Ball& a, const Ball& b) {
    if (a.radius_exp_ != b.radius_exp_) {
        return a.radius_exp_ < b.radius_exp_;
    }
    return a.center_.digits() < b.center_.digits();
}

std::string Ball::describe() const {
    return "B(" + center_.encode() + ", p^" + std::to_string(radius_exp_) + ")";
}

Rational haar_measure(const Ball& b) {
    return rational_power(b.prime(), b.radius_exp());
}

Rational shell_measure(std::int64_t p, int k) {
    return rational_power(p, k - 1) * Rational(p - 1);
}

double shell_volume(std::int64_t p, int k) {
    return real_power(p, k) * (1.0 - 1.0 / static_cast<double>(p));
}

long double gamma_p_extended(std::int64_t p, long double z) {
    if (std::fabs(z) < 1e-9L) {
        throw DomainError("Gamma_p has a pole at z = 0 (got z = " + std::to_string(static_cast<double>(z)) + ")");
    }
    const long double lp = std::log(static_cast<long double>(p));
    // expm1 keeps the small-argument factors accurate.
    return std::expm1((z - 1.0L) * lp) / std::expm1(-z * lp);
}

double gamma_p(std::int64_t p, double z) {
    return static_cast<double>(gamma_p_extended(p, z));
}

// ---------------------------------------------------------------- GridSpec

GridSpec::GridSpec(std::int64_t p, int N, int M, std::size_t cap) : p_(p), N_(N), M_(M), cap_(cap) {
    require_prime(p);
    if (N + M < 1) {
        throw PreconditionError("grid needs N + M >= 1");
    }
    std::size_t d = 1;
    for (int i = 0; i < N + M; ++i) {
        d *= static_cast<std::size_t>(p);
        if (d > cap) {
            throw ResourceError("grid dimension p^(N+M) = " + std::to_string(p) + "^" + std::to_string(N + M)
                                + " exceeds cap " + std::to_string(cap));
        }
    }
    dim_ = d;
}

double GridSpec::cell_measure() const {
    return real_power(p_, -M_);
}

double GridSpec::domain_measure() const {
    return real_power(p_, N_);
}

PAdicExpansion GridSpec::representative(std::size_t index) const {
    if (index >= dim_) {
        throw std::out_of_range("grid index out of range");
    }
    return PAdicExpansion::from_scaled_integer(p_, index, -N_);
}

std::size_t GridSpec::index_of(const PAdicExpansion& x) const {
    if (x.prime() != p_) {
        throw PreconditionError("point and grid use different primes");
    }
    if (const auto v = x.valuation(); v && *v < -N_) {
        throw PreconditionError("point " + x.encode() + " lies outside B_" + std::to_string(N_));
    }
    std::size_t i = 0;
    std::size_t w = 1;
    for (int j = -N_; j < M_; ++j) {
        i += static_cast<std::size_t>(x.digit(j)) * w;
        w *= static_cast<std::size_t>(p_);
    }
    return i;
}

int integer_valuation(std::int64_t p, std::uint64_t n) {
    if (n == 0) {
        throw std::domain_error("valuation of 0");
    }
    int v = 0;
    const auto up = static_cast<std::uint64_t>(p);
    while (n % up == 0) {
        n /= up;
        ++v;
    }
    return v;
}

std::optional<int> GridSpec::distance_exp(std::size_t i, std::size_t j) const {
    if (i == j) {
        return std::nullopt;
    }
    const std::uint64_t d = i > j ? i - j : j - i;
    return N_ - integer_valuation(p_, d);
}

} // namespace padic
