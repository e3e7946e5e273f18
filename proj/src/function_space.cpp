#include "padic/function_space.hpp"

#include "padic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace padic {

// ---------------------------------------------------------------- TestFunction

Complex TestFunction::operator()(const PAdicExpansion& x) const {
    Complex s{};
    for (const auto& t : terms_) {
        if (t.ball.contains(x)) {
            s += t.coefficient;
        }
    }
    return s;
}

std::optional<int> TestFunction::min_radius_exp() const {
    std::optional<int> r;
    for (const auto& t : terms_) {
        r = r ? std::min(*r, t.ball.radius_exp()) : t.ball.radius_exp();
    }
    return r;
}

TestFunction& TestFunction::operator+=(const TestFunction& other) {
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    return *this;
}

TestFunction operator-(TestFunction a, const TestFunction& b) {
    return a += Complex(-1.0) * b;
}

TestFunction operator*(Complex s, TestFunction f) {
    for (auto& t : f.terms_) {
        t.coefficient *= s;
    }
    return f;
}

TestFunction refine(const TestFunction& f, int radius_exp) {
    const auto r = f.min_radius_exp();
    if (!r) {
        return {};
    }
    if (radius_exp > *r) {
        throw PreconditionError("refine: target radius exponent " + std::to_string(radius_exp)
                                + " is coarser than the finest term (" + std::to_string(*r) + ")");
    }
    std::map<Ball, Complex> acc;
    for (const auto& t : f.terms()) {
        for (const auto& child : t.ball.refine(radius_exp)) {
            acc[child] += t.coefficient;
        }
    }
    std::vector<TestFunction::Term> out;
    for (const auto& [b, c] : acc) {
        if (c != Complex{}) {
            out.push_back({c, b});
        }
    }
    return TestFunction(std::move(out));
}

TestFunction canonicalize(const TestFunction& f) {
    const auto r = f.min_radius_exp();
    return r ? refine(f, *r) : TestFunction{};
}

TestFunction convolve_indicators(const Ball& b1, const Ball& b2) {
    const int k = b1.radius_exp();
    const int l = b2.radius_exp();
    const int top = std::max(k, l);
    const double coeff = real_power(b1.prime(), k + l - top);
    return TestFunction::indicator(Ball(b1.center() + b2.center(), top), coeff);
}

Norms norms(const TestFunction& f) {
    const TestFunction c = canonicalize(f);
    Norms n;
    for (const auto& t : c.terms()) {
        const double m = real_power(t.ball.prime(), t.ball.radius_exp());
        const double a = std::abs(t.coefficient);
        n.l1 += a * m;
        n.l2 += a * a * m;
        n.linf = std::max(n.linf, a);
    }
    n.l2 = std::sqrt(n.l2);
    return n;
}

Complex integral(const TestFunction& f) {
    Complex s{};
    for (const auto& t : f.terms()) {
        s += t.coefficient * real_power(t.ball.prime(), t.ball.radius_exp());
    }
    return s;
}

// ---------------------------------------------------------------- GridFunction

GridFunction::GridFunction(GridSpec grid) : grid_(grid), values_(grid.dim(), Complex{}) {}

GridFunction::GridFunction(GridSpec grid, std::vector<Complex> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.dim()) {
        throw PreconditionError("grid function has " + std::to_string(values_.size()) + " values, grid dim is "
                                + std::to_string(grid_.dim()));
    }
}

GridFunction GridFunction::constant(const GridSpec& grid, Complex c) {
    return GridFunction(grid, std::vector<Complex>(grid.dim(), c));
}

GridFunction GridFunction::from_real(const GridSpec& grid, std::span<const double> values) {
    return GridFunction(grid, std::vector<Complex>(values.begin(), values.end()));
}

std::vector<double> GridFunction::real_values(double tol) const {
    std::vector<double> out(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (std::abs(values_[i].imag()) > tol) {
            throw DomainError("grid function has a nonzero imaginary part at index " + std::to_string(i));
        }
        out[i] = values_[i].real();
    }
    return out;
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    if (!(grid_ == other.grid_)) {
        throw PreconditionError("grid mismatch");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] += other.values_[i];
    }
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    if (!(grid_ == other.grid_)) {
        throw PreconditionError("grid mismatch");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] -= other.values_[i];
    }
    return *this;
}

GridFunction& GridFunction::operator*=(Complex s) {
    for (auto& v : values_) {
        v *= s;
    }
    return *this;
}

Norms norms(const GridFunction& u) {
    const double w = u.grid().cell_measure();
    Norms n;
    for (const auto& v : u.values()) {
        const double a = std::abs(v);
        n.l1 += a;
        n.l2 += a * a;
        n.linf = std::max(n.linf, a);
    }
    n.l1 *= w;
    n.l2 = std::sqrt(n.l2 * w);
    return n;
}

Complex integral(const GridFunction& u) {
    Complex s{};
    for (const auto& v : u.values()) {
        s += v;
    }
    return s * u.grid().cell_measure();
}

Complex mean(const GridFunction& u) {
    return integral(u) / u.grid().domain_measure();
}

GridFunction to_grid(const TestFunction& f, const GridSpec& g) {
    GridFunction u(g);
    const TestFunction c = canonicalize(f);
    if (c.empty()) {
        return u;
    }
    const Ball domain(PAdicExpansion(g.p()), g.N());
    for (const auto& t : c.terms()) {
        if (t.ball.radius_exp() < -g.M()) {
            throw PrecisionError("ball " + t.ball.describe() + " is finer than the grid resolution p^"
                                 + std::to_string(-g.M()));
        }
        if (!domain.contains(t.ball)) {
            throw PrecisionError("ball " + t.ball.describe() + " is not contained in B_" + std::to_string(g.N()));
        }
    }
    const TestFunction fine = refine(c, -g.M());
    for (const auto& t : fine.terms()) {
        u[g.index_of(t.ball.center())] = t.coefficient;
    }
    return u;
}

TestFunction from_grid(const GridFunction& u) {
    const GridSpec& g = u.grid();
    std::vector<TestFunction::Term> terms;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] != Complex{}) {
            terms.push_back({u[i], Ball(g.representative(i), -g.M())});
        }
    }
    return TestFunction(std::move(terms));
}

namespace {

std::vector<Complex> roots_of_unity(std::size_t n) {
    std::vector<Complex> r(n);
    for (std::size_t k = 0; k < n; ++k) {
        r[k] = unit_root(static_cast<std::int64_t>(k), static_cast<std::int64_t>(n));
    }
    return r;
}

// X_j = sum_i w^{sign * i j} x_i with w = exp(2 pi i / n), n = p^k.
std::vector<Complex> direct_transform(std::span<const Complex> x, int sign) {
    const std::size_t n = x.size();
    const auto roots = roots_of_unity(n);
    std::vector<Complex> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        Complex s{};
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = (i * j) % n;
            s += roots[sign > 0 ? k : (n - k) % n] * x[i];
        }
        out[j] = s;
    }
    return out;
}

void radix_p_transform(std::span<const Complex> x, std::size_t stride, std::size_t n, std::size_t p,
                       std::span<const Complex> roots, std::size_t root_step, int sign, std::span<Complex> out) {
    if (n == 1) {
        out[0] = x[0];
        return;
    }
    const std::size_t m = n / p;
    std::vector<Complex> sub(n);
    for (std::size_t r = 0; r < p; ++r) {
        radix_p_transform(x.subspan(r * stride), stride * p, m, p, roots, root_step * p, sign,
                          std::span<Complex>(sub).subspan(r * m, m));
    }
    const std::size_t total = roots.size();
    for (std::size_t j = 0; j < n; ++j) {
        Complex s{};
        for (std::size_t r = 0; r < p; ++r) {
            const std::size_t k = (r * j * root_step) % total;
            s += roots[sign > 0 ? k : (total - k) % total] * sub[r * m + (j % m)];
        }
        out[j] = s;
    }
}

std::vector<Complex> transform(std::span<const Complex> x, std::size_t p, int sign, FourierMethod method) {
    if (method == FourierMethod::Direct) {
        return direct_transform(x, sign);
    }
    const auto roots = roots_of_unity(x.size());
    std::vector<Complex> out(x.size());
    radix_p_transform(x, 1, x.size(), p, roots, 1, sign, out);
    return out;
}

} // namespace

GridFunction grid_fourier(const GridFunction& u, FourierMethod method) {
    const GridSpec dual = u.grid().dual();
    auto values = transform(u.values(), static_cast<std::size_t>(u.grid().p()), +1, method);
    const double w = u.grid().cell_measure();
    for (auto& v : values) {
        v *= w;
    }
    return GridFunction(dual, std::move(values));
}

GridFunction inverse_grid_fourier(const GridFunction& U, FourierMethod method) {
    const GridSpec primal = U.grid().dual();
    auto values = transform(U.values(), static_cast<std::size_t>(U.grid().p()), -1, method);
    const double w = U.grid().cell_measure();
    for (auto& v : values) {
        v *= w;
    }
    return GridFunction(primal, std::move(values));
}

GridFunction grid_convolve(const GridFunction& u, const GridFunction& v) {
    if (!(u.grid() == v.grid())) {
        throw PreconditionError("grid mismatch");
    }
    const std::size_t n = u.size();
    GridFunction out(u.grid());
    const double w = u.grid().cell_measure();
    for (std::size_t i = 0; i < n; ++i) {
        Complex s{};
        for (std::size_t j = 0; j < n; ++j) {
            s += u[(i + n - j) % n] * v[j];
        }
        out[i] = w * s;
    }
    return out;
}

GridFunction translate_by_index(const GridFunction& u, std::size_t shift) {
    GridFunction out(u.grid());
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = u[(i + shift) % n];
    }
    return out;
}

GridFunction translate(const GridFunction& u, const PAdicExpansion& h) {
    return translate_by_index(u, u.grid().index_of(h));
}

double modulus_of_continuity(const GridFunction& u, int r) {
    const GridSpec& g = u.grid();
    if (r >= g.M()) {
        return 0.0;
    }
    // |h| <= p^{-r}  <=>  h has digits only at exponents >= r  <=>  index divisible by p^{r+N}
    std::size_t step = 1;
    for (int k = 0; k < r + g.N(); ++k) {
        step *= static_cast<std::size_t>(g.p());
    }
    double worst = 0.0;
    for (std::size_t s = step; s < g.dim(); s += step) {
        worst = std::max(worst, norms(translate_by_index(u, s) - u).l1);
    }
    return worst;
}

// ---------------------------------------------------------------- RadialFunction

RadialFunction::RadialFunction(std::int64_t p, int k_min, std::vector<Complex> shells, Complex value_at_zero,
                               std::optional<PowerTail> tail)
    : p_(p), k_min_(k_min), shells_(std::move(shells)), zero_(value_at_zero), tail_(tail) {
    require_prime(p);
}

Complex RadialFunction::shell_value(int k) const {
    if (k < k_min_) {
        return zero_;
    }
    if (k <= k_max()) {
        return shells_[static_cast<std::size_t>(k - k_min_)];
    }
    if (tail_) {
        return tail_->coefficient * real_power(p_, k * tail_->exponent);
    }
    return {};
}

Complex RadialFunction::operator()(const PAdicExpansion& x) const {
    const auto v = x.valuation();
    return v ? shell_value(-*v) : zero_;
}

namespace {

// sum_{k > k_max} p^k (1 - 1/p) p^{k q}, requires q + 1 < 0
double geometric_tail_mass(std::int64_t p, int k_max, double q) {
    const double r = real_power(p, q + 1.0);
    return (1.0 - 1.0 / static_cast<double>(p)) * real_power(p, (k_max + 1) * (q + 1.0)) / (1.0 - r);
}

} // namespace

Norms norms(const RadialFunction& f) {
    const std::int64_t p = f.prime();
    const double inner = real_power(p, f.k_min() - 1);
    Norms n;
    const double a0 = std::abs(f.value_at_zero());
    n.l1 = a0 * inner;
    n.l2 = a0 * a0 * inner;
    n.linf = a0;
    for (int k = f.k_min(); k <= f.k_max(); ++k) {
        const double a = std::abs(f.shell_value(k));
        const double m = shell_volume(p, k);
        n.l1 += a * m;
        n.l2 += a * a * m;
        n.linf = std::max(n.linf, a);
    }
    if (const auto& t = f.tail(); t && t->coefficient != Complex{}) {
        const double c = std::abs(t->coefficient);
        if (t->exponent >= -1.0) {
            throw DomainError("radial tail with exponent " + std::to_string(t->exponent) + " is not integrable");
        }
        n.l1 += c * geometric_tail_mass(p, f.k_max(), t->exponent);
        n.l2 += c * c * geometric_tail_mass(p, f.k_max(), 2.0 * t->exponent);
        n.linf = std::max(n.linf, std::abs(f.shell_value(f.k_max() + 1)));
    }
    n.l2 = std::sqrt(n.l2);
    return n;
}

Complex integral(const RadialFunction& f) {
    const std::int64_t p = f.prime();
    Complex s = f.value_at_zero() * real_power(p, f.k_min() - 1);
    for (int k = f.k_min(); k <= f.k_max(); ++k) {
        s += f.shell_value(k) * shell_volume(p, k);
    }
    if (const auto& t = f.tail(); t && t->coefficient != Complex{}) {
        if (t->exponent >= -1.0) {
            throw DomainError("radial tail with exponent " + std::to_string(t->exponent) + " is not integrable");
        }
        s += t->coefficient * geometric_tail_mass(p, f.k_max(), t->exponent);
    }
    return s;
}

// ---------------------------------------------------------------- ExtendedGridFunction

Complex ExtendedGridFunction::exterior_value(int k) const {
    const int N = core.grid().N();
    if (k <= N) {
        throw PreconditionError("shell " + std::to_string(k) + " is inside B_N");
    }
    const auto idx = static_cast<std::size_t>(k - N - 1);
    return idx < exterior.size() ? exterior[idx] : Complex{};
}

Complex ExtendedGridFunction::operator()(const PAdicExpansion& x) const {
    const auto v = x.valuation();
    if (!v || -*v <= core.grid().N()) {
        return core[core.grid().index_of(x)];
    }
    return exterior_value(-*v);
}

Norms norms(const ExtendedGridFunction& u) {
    Norms n = norms(u.core);
    n.l2 *= n.l2;
    const std::int64_t p = u.core.grid().p();
    for (std::size_t i = 0; i < u.exterior.size(); ++i) {
        const int k = u.core.grid().N() + 1 + static_cast<int>(i);
        const double m = shell_volume(p, k);
        const double a = std::abs(u.exterior[i]);
        n.l1 += a * m;
        n.l2 += a * a * m;
        n.linf = std::max(n.linf, a);
    }
    n.l2 = std::sqrt(n.l2);
    return n;
}

Complex integral(const ExtendedGridFunction& u) {
    Complex s = integral(u.core);
    const std::int64_t p = u.core.grid().p();
    for (std::size_t i = 0; i < u.exterior.size(); ++i) {
        const int k = u.core.grid().N() + 1 + static_cast<int>(i);
        s += u.exterior[i] * shell_volume(p, k);
    }
    return s;
}

ExtendedGridFunction operator-(const ExtendedGridFunction& a, const ExtendedGridFunction& b) {
    ExtendedGridFunction out(a.core - b.core, std::max(a.exterior.size(), b.exterior.size()));
    for (std::size_t i = 0; i < out.exterior.size(); ++i) {
        const Complex x = i < a.exterior.size() ? a.exterior[i] : Complex{};
        const Complex y = i < b.exterior.size() ? b.exterior[i] : Complex{};
        out.exterior[i] = x - y;
    }
    out.truncation_bound = a.truncation_bound + b.truncation_bound;
    return out;
}

} // namespace padic
