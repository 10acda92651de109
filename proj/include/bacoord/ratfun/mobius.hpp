#pragma once

#include "bacoord/ratfun/rational_function.hpp"

namespace bacoord {

/// z ↦ (a z + b) / (c z + d), optionally preceded by complex conjugation.
struct MobiusMap {
    Complex a = 1.0;
    Complex b = 0.0;
    Complex c = 0.0;
    Complex d = 1.0;
    bool conjugating = false;

    static MobiusMap identity() { return {}; }
    static MobiusMap negation() { return {-1.0, 0.0, 0.0, 1.0, false}; }
    static MobiusMap conjugation() { return {1.0, 0.0, 0.0, 1.0, true}; }

    Complex determinant() const noexcept { return a * d - b * c; }
    /// Same matrix with conjugated entries (holomorphic part of the map).
    MobiusMap conjugated_matrix() const;

    SpherePoint operator()(const SpherePoint& z) const;
};

/// Throws InvariantError if |det| <= tol relative to the entries.
void check_nondegenerate(const MobiusMap& m, double tol);

/// this ∘ other, as maps of the sphere.
MobiusMap compose(const MobiusMap& outer, const MobiusMap& inner);

/// True when the map acts as the identity (matrix proportional to I, no conjugation).
bool is_identity(const MobiusMap& m, double tol);

/// f ∘ m for a holomorphic m, with the pole structure recomputed.
RationalFunction compose(const RationalFunction& f, const MobiusMap& m);

/// Pullback of R(z)dz.
///
/// Holomorphic m: R(m(z)) m'(z) dz.
/// Conjugating m (z ↦ M(conj z)): the holomorphic form conj(m*ω), which equals the
/// pullback of the coefficient-conjugated form by the conjugated matrix. With this
/// convention the reality hypothesis τ*Ω = conj(Ω) reads pullback(τ, Ω) == Ω.
RationalOneForm pullback(const MobiusMap& m, const RationalOneForm& w);

}  // namespace bacoord
