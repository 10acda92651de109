#include "bacoord/ratfun/sphere_point.hpp"

#include <algorithm>
#include <cstdio>

#include "bacoord/ratfun/tolerances.hpp"

namespace bacoord {

namespace {
Tolerances g_tolerances{};
}  // namespace

const Tolerances& tolerances() noexcept { return g_tolerances; }
void set_tolerances(const Tolerances& tol) noexcept { g_tolerances = tol; }

std::string SpherePoint::to_string() const {
    if (is_infinite()) return "inf";
    char buf[96];
    const Complex z = *value_;
    if (z.imag() == 0.0) {
        std::snprintf(buf, sizeof buf, "%.10g", z.real());
    } else if (z.real() == 0.0) {
        std::snprintf(buf, sizeof buf, "%.10gi", z.imag());
    } else {
        std::snprintf(buf, sizeof buf, "%.10g%+.10gi", z.real(), z.imag());
    }
    return buf;
}

bool approx_equal(Complex a, Complex b, double tol) {
    return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

bool approx_equal(const SpherePoint& a, const SpherePoint& b, double tol) {
    if (a.is_infinite() || b.is_infinite()) return a.is_infinite() && b.is_infinite();
    return approx_equal(a.value(), b.value(), tol);
}

}  // namespace bacoord
