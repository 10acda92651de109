#include "bacoord/ratfun/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bacoord {

Polynomial::Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

Polynomial::Polynomial(std::initializer_list<Complex> coeffs) : coeffs_(coeffs) { trim(); }

void Polynomial::trim() {
    while (!coeffs_.empty() && coeffs_.back() == Complex{}) coeffs_.pop_back();
}

Polynomial Polynomial::constant(Complex c) { return Polynomial({c}); }

Polynomial Polynomial::linear_power(Complex root, int power) {
    if (power < 0) throw std::invalid_argument("linear_power: negative power");
    Polynomial result = constant(1.0);
    const Polynomial factor({-root, 1.0});
    for (int k = 0; k < power; ++k) result = result * factor;
    return result;
}

Polynomial Polynomial::from_roots(std::span<const Complex> roots) {
    std::vector<Complex> c{1.0};
    for (Complex r : roots) {
        std::vector<Complex> next(c.size() + 1);
        for (std::size_t k = 0; k < c.size(); ++k) {
            next[k + 1] += c[k];
            next[k] -= r * c[k];
        }
        c = std::move(next);
    }
    return Polynomial(std::move(c));
}

Complex Polynomial::coefficient(int k) const noexcept {
    if (k < 0 || k >= static_cast<int>(coeffs_.size())) return {};
    return coeffs_[static_cast<std::size_t>(k)];
}

Complex Polynomial::operator()(Complex z) const noexcept {
    Complex acc{};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
}

double Polynomial::magnitude_at(Complex z) const noexcept {
    const double r = std::abs(z);
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * r + std::abs(*it);
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() <= 1) return {};
    std::vector<Complex> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
    return Polynomial(std::move(d));
}

std::vector<Complex> Polynomial::taylor(Complex center, int terms) const {
    // Repeated synthetic division by (z - center) yields the shifted coefficients.
    std::vector<Complex> out(static_cast<std::size_t>(std::max(terms, 0)));
    std::vector<Complex> work = coeffs_;
    for (int k = 0; k < terms && !work.empty(); ++k) {
        for (std::size_t i = work.size() - 1; i > 0; --i) work[i - 1] += center * work[i];
        out[static_cast<std::size_t>(k)] = work.front();
        work.erase(work.begin());
    }
    return out;
}

std::vector<double> Polynomial::taylor_magnitudes(Complex center, int terms) const {
    std::vector<double> out(static_cast<std::size_t>(std::max(terms, 0)));
    std::vector<double> work(coeffs_.size());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) work[i] = std::abs(coeffs_[i]);
    const double r = std::abs(center);
    for (int k = 0; k < terms && !work.empty(); ++k) {
        for (std::size_t i = work.size() - 1; i > 0; --i) work[i - 1] += r * work[i];
        out[static_cast<std::size_t>(k)] = work.front();
        work.erase(work.begin());
    }
    return out;
}

std::pair<Polynomial, Complex> Polynomial::deflate(Complex root) const {
    if (coeffs_.empty()) return {Polynomial{}, Complex{}};
    std::vector<Complex> q(coeffs_.size() - 1);
    Complex carry{};
    for (std::size_t i = coeffs_.size(); i-- > 0;) {
        const Complex value = coeffs_[i] + carry * root;
        if (i == 0) return {Polynomial(std::move(q)), value};
        q[i - 1] = value;
        carry = value;
    }
    return {Polynomial(std::move(q)), Complex{}};
}

std::pair<Polynomial, Polynomial> Polynomial::divmod(const Polynomial& divisor) const {
    if (divisor.is_zero()) throw std::domain_error("Polynomial::divmod: division by zero polynomial");
    if (degree() < divisor.degree()) return {Polynomial{}, *this};
    std::vector<Complex> rem = coeffs_;
    const std::size_t dn = divisor.coeffs_.size();
    std::vector<Complex> quot(rem.size() - dn + 1);
    const Complex lead = divisor.leading();
    for (std::size_t k = quot.size(); k-- > 0;) {
        const Complex q = rem[k + dn - 1] / lead;
        quot[k] = q;
        for (std::size_t j = 0; j < dn; ++j) rem[k + j] -= q * divisor.coeffs_[j];
        rem[k + dn - 1] = Complex{};
    }
    rem.resize(dn - 1);
    return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

Polynomial Polynomial::conjugated() const {
    std::vector<Complex> c(coeffs_.size());
    std::transform(coeffs_.begin(), coeffs_.end(), c.begin(), [](Complex x) { return std::conj(x); });
    return Polynomial(std::move(c));
}

Polynomial Polynomial::pow(int exponent) const {
    if (exponent < 0) throw std::invalid_argument("Polynomial::pow: negative exponent");
    Polynomial result = constant(1.0);
    for (int k = 0; k < exponent; ++k) result = result * *this;
    return result;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<Complex> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
    for (std::size_t k = 0; k < a.coeffs_.size(); ++k) c[k] += a.coeffs_[k];
    for (std::size_t k = 0; k < b.coeffs_.size(); ++k) c[k] += b.coeffs_[k];
    return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Complex> c(a.coeffs_.size() + b.coeffs_.size() - 1);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Polynomial(std::move(c));
}

Polynomial operator*(Complex s, const Polynomial& p) {
    std::vector<Complex> c(p.coeffs_);
    for (auto& x : c) x *= s;
    return Polynomial(std::move(c));
}

Polynomial Polynomial::operator-() const { return Complex{-1.0} * *this; }

}  // namespace bacoord
