#pragma once

#include <complex>
#include <optional>
#include <string>

namespace bacoord {

using Complex = std::complex<double>;

/// A point of the Riemann sphere C ∪ {∞}.
class SpherePoint {
public:
    SpherePoint() : value_(Complex{}) {}
    SpherePoint(Complex z) : value_(z) {}  // NOLINT: implicit by intent
    SpherePoint(double x) : value_(Complex{x, 0.0}) {}  // NOLINT

    static SpherePoint infinity() { return SpherePoint(std::nullopt); }

    bool is_infinite() const noexcept { return !value_.has_value(); }
    bool is_finite() const noexcept { return value_.has_value(); }
    /// Precondition: is_finite().
    Complex value() const { return *value_; }

    SpherePoint conjugated() const {
        return is_infinite() ? *this : SpherePoint(std::conj(*value_));
    }

    std::string to_string() const;

private:
    explicit SpherePoint(std::nullopt_t) : value_(std::nullopt) {}
    std::optional<Complex> value_;
};

/// Coincidence within `tol`, measured relative to 1 + max(|a|, |b|).
bool approx_equal(const SpherePoint& a, const SpherePoint& b, double tol);
bool approx_equal(Complex a, Complex b, double tol);

}  // namespace bacoord
