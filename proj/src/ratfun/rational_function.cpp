#include "bacoord/ratfun/rational_function.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <stdexcept>

#include "bacoord/errors.hpp"
#include "bacoord/ratfun/tolerances.hpp"

namespace bacoord {

namespace {

bool all_finite(const Polynomial& p) {
    return std::all_of(p.coefficients().begin(), p.coefficients().end(),
                       [](Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

bool finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

bool vanishes_at(const Polynomial& p, Complex z, double tol) {
    return std::abs(p(z)) <= tol * p.magnitude_at(z);
}

// Truncated product of two power series.
std::vector<Complex> series_mul(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    std::vector<Complex> c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; i + j < a.size() && j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

// Taylor coefficients of (t + delta)^{-order} in powers of t.
std::vector<Complex> inverse_power_series(Complex delta, int order, int terms) {
    std::vector<Complex> s(static_cast<std::size_t>(terms));
    if (terms == 0) return s;
    s[0] = std::pow(delta, -order);
    for (int k = 1; k < terms; ++k) {
        s[static_cast<std::size_t>(k)] =
            s[static_cast<std::size_t>(k - 1)] * (-static_cast<double>(order + k - 1) / k) / delta;
    }
    return s;
}

}  // namespace

RationalFunction::RationalFunction(Unchecked, Polynomial numerator, std::vector<Pole> poles, Complex scale)
    : numerator_(std::move(numerator)), poles_(std::move(poles)), scale_(scale) {}

RationalFunction::RationalFunction(Polynomial numerator, std::vector<Pole> poles, Complex scale)
    : numerator_(std::move(numerator)), poles_(std::move(poles)), scale_(scale) {
    const double tol = tolerances().point;
    if (!finite(scale_) || !all_finite(numerator_))
        throw InvariantError("finite coefficients", "rational function has a non-finite coefficient");
    for (std::size_t i = 0; i < poles_.size(); ++i) {
        const Pole& p = poles_[i];
        if (!finite(p.location)) throw InvariantError("finite pole location", "pole location is not finite");
        if (p.order < 1) throw InvariantError("positive pole order", "pole order must be >= 1");
        for (std::size_t j = 0; j < i; ++j) {
            if (approx_equal(p.location, poles_[j].location, tol))
                throw InvariantError("distinct poles", "two declared poles coincide at " +
                                                           SpherePoint(p.location).to_string());
        }
        if (!is_zero() && vanishes_at(numerator_, p.location, tol))
            throw InvariantError("numerator nonzero at poles", "numerator vanishes at declared pole " +
                                                                  SpherePoint(p.location).to_string());
    }
    if (is_zero() && !poles_.empty())
        throw InvariantError("numerator nonzero at poles", "zero numerator with declared poles");
}

RationalFunction RationalFunction::reduced(Polynomial numerator, std::vector<Pole> poles, Complex scale) {
    if (numerator.is_zero() || scale == Complex{}) return RationalFunction{};
    const double tol = tolerances().point;

    std::vector<Pole> merged;
    for (const Pole& p : poles) {
        if (p.order == 0) continue;
        auto it = std::find_if(merged.begin(), merged.end(),
                               [&](const Pole& q) { return approx_equal(q.location, p.location, tol); });
        if (it == merged.end()) merged.push_back(p);
        else it->order += p.order;
    }

    std::vector<Pole> kept;
    for (Pole p : merged) {
        if (p.order < 0) {
            // A negative order is a zero: move it to the numerator.
            numerator = numerator * Polynomial::linear_power(p.location, -p.order);
            continue;
        }
        while (p.order > 0 && numerator.degree() >= 1 && vanishes_at(numerator, p.location, tol)) {
            numerator = numerator.deflate(p.location).first;
            --p.order;
        }
        if (p.order > 0) kept.push_back(p);
    }
    return RationalFunction(Unchecked{}, std::move(numerator), std::move(kept), scale);
}

RationalFunction RationalFunction::constant(Complex c) {
    if (c == Complex{}) return RationalFunction{};
    return RationalFunction(Unchecked{}, Polynomial::constant(c), {}, 1.0);
}

RationalFunction RationalFunction::polynomial(Polynomial p) {
    return RationalFunction(Unchecked{}, std::move(p), {}, 1.0);
}

RationalFunction RationalFunction::simple_pole(Complex p) {
    return RationalFunction(Unchecked{}, Polynomial::constant(1.0), {Pole{p, 1}}, 1.0);
}

int RationalFunction::denominator_degree() const noexcept {
    int d = 0;
    for (const Pole& p : poles_) d += p.order;
    return d;
}

Polynomial RationalFunction::denominator() const {
    Polynomial d = Polynomial::constant(1.0);
    for (const Pole& p : poles_) d = d * Polynomial::linear_power(p.location, p.order);
    return d;
}

std::optional<int> RationalFunction::pole_order_at(Complex z, double tol) const {
    for (const Pole& p : poles_)
        if (approx_equal(p.location, z, tol)) return p.order;
    return std::nullopt;
}

std::vector<Complex> RationalFunction::laurent_at_pole(std::size_t pole_index, int terms) const {
    const Pole& pole = poles_.at(pole_index);
    std::vector<Complex> series = numerator_.taylor(pole.location, terms);
    for (auto& c : series) c *= scale_;
    for (std::size_t k = 0; k < poles_.size(); ++k) {
        if (k == pole_index) continue;
        series = series_mul(series, inverse_power_series(pole.location - poles_[k].location, poles_[k].order, terms));
    }
    return series;
}

std::vector<Complex> RationalFunction::taylor_at(Complex z, int terms) const {
    std::vector<Complex> series = numerator_.taylor(z, terms);
    for (auto& c : series) c *= scale_;
    for (const Pole& p : poles_) series = series_mul(series, inverse_power_series(z - p.location, p.order, terms));
    return series;
}

RationalFunction RationalFunction::conjugated() const {
    std::vector<Pole> poles = poles_;
    for (auto& p : poles) p.location = std::conj(p.location);
    return RationalFunction(Unchecked{}, numerator_.conjugated(), std::move(poles), std::conj(scale_));
}

RationalFunction RationalFunction::scaled(Complex s) const {
    if (s == Complex{}) return RationalFunction{};
    return RationalFunction(Unchecked{}, numerator_, poles_, scale_ * s);
}

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    if (a.is_zero() || b.is_zero()) return RationalFunction{};
    std::vector<Pole> poles = a.poles_;
    poles.insert(poles.end(), b.poles_.begin(), b.poles_.end());
    return RationalFunction::reduced(a.numerator_ * b.numerator_, std::move(poles), a.scale_ * b.scale_);
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const double tol = tolerances().point;
    // Least common multiple of the factored denominators.
    std::vector<Pole> common = a.poles_;
    for (const Pole& p : b.poles_) {
        auto it = std::find_if(common.begin(), common.end(),
                               [&](const Pole& q) { return approx_equal(q.location, p.location, tol); });
        if (it == common.end()) common.push_back(p);
        else it->order = std::max(it->order, p.order);
    }
    auto lift = [&](const RationalFunction& f) {
        Polynomial n = f.scale_ * f.numerator_;
        for (const Pole& q : common) {
            const int own = f.pole_order_at(q.location, tol).value_or(0);
            if (q.order > own) n = n * Polynomial::linear_power(q.location, q.order - own);
        }
        return n;
    };
    Polynomial numerator = lift(a) + lift(b);
    return RationalFunction::reduced(std::move(numerator), std::move(common), 1.0);
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + b.scaled(-1.0); }

// ---------------------------------------------------------------------------

Complex evaluate(const RationalFunction& f, const SpherePoint& z) {
    if (f.is_zero()) return {};
    if (z.is_infinite()) {
        const int dn = f.numerator_degree();
        const int dd = f.denominator_degree();
        if (dn < dd) return {};
        if (dn == dd) return f.scale() * f.numerator().leading();
        throw InfiniteValue("rational function has a pole at infinity");
    }
    const Complex w = z.value();
    const double tol = tolerances().point;
    Complex den = 1.0;
    for (const Pole& p : f.poles()) {
        if (approx_equal(p.location, w, tol))
            throw PoleEvaluation("evaluation at pole " + SpherePoint(p.location).to_string());
        den *= std::pow(w - p.location, p.order);
    }
    return f.scale() * f.numerator()(w) / den;
}

int order_at(const RationalFunction& f, const SpherePoint& z, double tol) {
    if (f.is_zero()) return INT_MAX;
    if (z.is_infinite()) return f.denominator_degree() - f.numerator_degree();
    const Complex w = z.value();
    if (auto m = f.pole_order_at(w, tol)) return -*m;
    const int terms = f.numerator_degree() + 1;
    const auto coeffs = f.numerator().taylor(w, terms);
    const auto mags = f.numerator().taylor_magnitudes(w, terms);
    for (int k = 0; k < terms; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        if (std::abs(coeffs[idx]) > tol * mags[idx]) return k;
    }
    return terms;  // unreachable for a nonzero numerator: the leading Taylor coefficient is exact
}

int order_at(const RationalOneForm& w, const SpherePoint& z, double tol) {
    const int o = order_at(w.coefficient, z, tol);
    if (o == INT_MAX) return o;
    return z.is_infinite() ? o - 2 : o;
}

namespace {

Complex residue_at_infinity(const RationalFunction& f) {
    if (f.is_zero()) return {};
    const Polynomial den = f.denominator();
    const int d = den.degree();
    if (d == 0) return {};
    const Polynomial rem = f.numerator().degree() >= d ? f.numerator().divmod(den).second : f.numerator();
    return -f.scale() * rem.coefficient(d - 1);
}

}  // namespace

Complex residue(const RationalOneForm& w, const SpherePoint& p) {
    const RationalFunction& f = w.coefficient;
    if (p.is_infinite()) return residue_at_infinity(f);
    const double tol = tolerances().point;
    const auto& poles = f.poles();
    for (std::size_t k = 0; k < poles.size(); ++k) {
        if (approx_equal(poles[k].location, p.value(), tol)) {
            const int m = poles[k].order;
            return f.laurent_at_pole(k, m)[static_cast<std::size_t>(m - 1)];
        }
    }
    throw NotAPole("no pole at " + p.to_string());
}

Complex residue_or_zero(const RationalOneForm& w, const SpherePoint& p) {
    if (p.is_finite() && !w.coefficient.pole_order_at(p.value(), tolerances().point)) return {};
    return residue(w, p);
}

Complex residue_sum(const RationalOneForm& w) {
    Complex total = residue_at_infinity(w.coefficient);
    for (const Pole& p : w.coefficient.poles()) total += residue(w, SpherePoint(p.location));
    return total;
}

double max_residue_magnitude(const RationalOneForm& w) {
    double m = std::abs(residue_at_infinity(w.coefficient));
    for (const Pole& p : w.coefficient.poles()) m = std::max(m, std::abs(residue(w, SpherePoint(p.location))));
    return m;
}

bool approx_equal(const RationalFunction& a, const RationalFunction& b, double rel) {
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    const double tol = tolerances().point;
    if (a.poles().size() != b.poles().size()) return false;
    for (const Pole& p : a.poles()) {
        auto m = b.pole_order_at(p.location, tol);
        if (!m || *m != p.order) return false;
    }
    const Polynomial na = a.scale() * a.numerator();
    const Polynomial nb = b.scale() * b.numerator();
    double scale = 0.0;
    for (Complex c : na.coefficients()) scale = std::max(scale, std::abs(c));
    for (Complex c : nb.coefficients()) scale = std::max(scale, std::abs(c));
    const Polynomial diff = na - nb;
    for (Complex c : diff.coefficients())
        if (std::abs(c) > rel * scale) return false;
    return true;
}

Complex epsilon_squared(const RationalOneForm& w, const SpherePoint& P, LocalParameter k) {
    const RationalFunction& f = w.coefficient;
    const double tol = tolerances().point;
    if (f.is_zero()) throw WrongVanishingOrder("form is identically zero");
    if (P.is_infinite()) {
        if (k != LocalParameter::Affine) throw std::invalid_argument("epsilon_squared: k = 1/(z-p) needs finite p");
        const int gap = f.denominator_degree() - f.numerator_degree();
        if (gap < 3) throw WrongVanishingOrder("z^3 R(z) is unbounded at infinity: no simple zero of the form");
        if (gap > 3) throw WrongVanishingOrder("z^3 R(z) tends to zero at infinity: zero of order > 1");
        return -f.scale() * f.numerator().leading();
    }
    if (k != LocalParameter::InversePole) throw std::invalid_argument("epsilon_squared: k = z needs P at infinity");
    const Complex p = P.value();
    if (f.pole_order_at(p, tol)) throw WrongVanishingOrder("form has a pole at " + P.to_string());
    const auto coeffs = f.numerator().taylor(p, 2);
    const auto mags = f.numerator().taylor_magnitudes(p, 2);
    if (std::abs(coeffs[0]) > tol * mags[0])
        throw WrongVanishingOrder("R(z)/(z-p) is unbounded: form does not vanish at " + P.to_string());
    if (std::abs(coeffs[1]) <= tol * mags[1])
        throw WrongVanishingOrder("R(z)/(z-p) tends to zero: zero of order > 1 at " + P.to_string());
    Complex den = 1.0;
    for (const Pole& q : f.poles()) den *= std::pow(p - q.location, q.order);
    return f.scale() * coeffs[1] / den;
}

}  // namespace bacoord
