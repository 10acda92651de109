#include "bacoord/ratfun/mobius.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bacoord/errors.hpp"
#include "bacoord/ratfun/tolerances.hpp"

namespace bacoord {

namespace {

double matrix_scale(const MobiusMap& m) {
    return std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c), std::abs(m.d)});
}

bool negligible(Complex x, double scale, double tol) { return std::abs(x) <= tol * scale; }

}  // namespace

MobiusMap MobiusMap::conjugated_matrix() const {
    return {std::conj(a), std::conj(b), std::conj(c), std::conj(d), false};
}

SpherePoint MobiusMap::operator()(const SpherePoint& z) const {
    const double tol = tolerances().point;
    const SpherePoint w = conjugating ? z.conjugated() : z;
    const double s = matrix_scale(*this);
    if (w.is_infinite()) {
        if (negligible(c, s, tol)) return SpherePoint::infinity();
        return SpherePoint(a / c);
    }
    const Complex v = w.value();
    const Complex den = c * v + d;
    if (std::abs(den) <= tol * (std::abs(c) * std::abs(v) + std::abs(d))) return SpherePoint::infinity();
    return SpherePoint((a * v + b) / den);
}

void check_nondegenerate(const MobiusMap& m, double tol) {
    const double scale = std::abs(m.a) * std::abs(m.d) + std::abs(m.b) * std::abs(m.c);
    if (!(std::abs(m.determinant()) > tol * scale))
        throw InvariantError("mobius determinant nonzero", "ad - bc vanishes");
}

MobiusMap compose(const MobiusMap& outer, const MobiusMap& inner) {
    const MobiusMap in = outer.conjugating ? inner.conjugated_matrix() : inner;
    return {outer.a * in.a + outer.b * in.c, outer.a * in.b + outer.b * in.d,
            outer.c * in.a + outer.d * in.c, outer.c * in.b + outer.d * in.d,
            outer.conjugating != inner.conjugating};
}

bool is_identity(const MobiusMap& m, double tol) {
    if (m.conjugating) return false;
    const double s = matrix_scale(m);
    return negligible(m.b, s, tol) && negligible(m.c, s, tol) && negligible(m.a - m.d, s, tol);
}

RationalFunction compose(const RationalFunction& f, const MobiusMap& m) {
    if (m.conjugating) throw std::invalid_argument("compose: conjugating map has no holomorphic composition");
    if (f.is_zero()) return f;
    const double tol = tolerances().point;

    // w = (a z + b) / L(z),  L(z) = c z + d.
    const Polynomial top({m.b, m.a});
    const Polynomial bottom({m.d, m.c});
    const int n = f.numerator_degree();

    // N(w) = Ñ(z) / L^n
    Polynomial num;
    const auto& nc = f.numerator().coefficients();
    for (int j = 0; j <= n; ++j) num = num + nc[static_cast<std::size_t>(j)] * (top.pow(j) * bottom.pow(n - j));

    Complex scale = f.scale();
    std::vector<Pole> poles;
    int bottom_power = -n;
    for (const Pole& p : f.poles()) {
        // w - p = (A z + B) / L(z)
        const Complex A = m.a - p.location * m.c;
        const Complex B = m.b - p.location * m.d;
        bottom_power += p.order;
        if (std::abs(A) > tol * (std::abs(m.a) + std::abs(p.location) * std::abs(m.c))) {
            scale /= std::pow(A, p.order);
            poles.push_back({-B / A, p.order});
        } else {
            // p = m(∞): this factor carries no finite root.
            scale /= std::pow(B, p.order);
        }
    }

    if (!negligible(m.c, matrix_scale(m), tol)) {
        const Complex z_inf = -m.d / m.c;
        scale *= std::pow(m.c, bottom_power);
        if (bottom_power > 0) num = num * Polynomial::linear_power(z_inf, bottom_power);
        else if (bottom_power < 0) poles.push_back({z_inf, -bottom_power});
    } else {
        scale *= std::pow(m.d, bottom_power);
    }
    return RationalFunction::reduced(std::move(num), std::move(poles), scale);
}

RationalOneForm pullback(const MobiusMap& m, const RationalOneForm& w) {
    const MobiusMap h = m.conjugating ? m.conjugated_matrix() : m;
    const RationalFunction f = m.conjugating ? w.coefficient.conjugated() : w.coefficient;
    const double tol = tolerances().point;

    // m'(z) = det / (c z + d)^2
    RationalFunction jacobian;
    if (!negligible(h.c, matrix_scale(h), tol)) {
        jacobian = RationalFunction::reduced(Polynomial::constant(1.0), {Pole{-h.d / h.c, 2}},
                                             h.determinant() / (h.c * h.c));
    } else {
        jacobian = RationalFunction::constant(h.determinant() / (h.d * h.d));
    }
    return {compose(f, h) * jacobian};
}

}  // namespace bacoord
