#pragma once

namespace bacoord {

/// Numeric thresholds shared by every module.
///
/// `point` decides when two points of the sphere coincide, when a numerator
/// vanishes at a declared pole and when a Möbius determinant is degenerate.
/// `residual` is the acceptance threshold for residue identities.
struct Tolerances {
    double point = 1e-9;
    double residual = 1e-10;
};

/// Process-wide tolerances. Set them once at startup, before any concurrent work.
const Tolerances& tolerances() noexcept;
void set_tolerances(const Tolerances& tol) noexcept;

}  // namespace bacoord
