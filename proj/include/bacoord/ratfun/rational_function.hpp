#pragma once

#include <optional>
#include <vector>

#include "bacoord/ratfun/polynomial.hpp"
#include "bacoord/ratfun/sphere_point.hpp"

namespace bacoord {

struct Pole {
    Complex location;
    int order = 1;
};

/// scale * numerator(z) / prod_k (z - p_k)^{m_k}
///
/// The denominator is kept factored. Residues and Laurent data at finite poles
/// then come from Taylor algebra of the other factors; no root finding is ever
/// needed. Behaviour at infinity follows from degree bookkeeping.
class RationalFunction {
public:
    /// The zero function.
    RationalFunction() = default;

    /// Checked construction. Throws InvariantError when two poles coincide, when a
    /// pole order is not positive, or when the numerator vanishes at a pole.
    RationalFunction(Polynomial numerator, std::vector<Pole> poles, Complex scale = 1.0);

    /// Canonicalising construction used by the algebra: coincident poles are
    /// merged and numerator roots sitting on poles are divided out.
    static RationalFunction reduced(Polynomial numerator, std::vector<Pole> poles, Complex scale = 1.0);

    static RationalFunction constant(Complex c);
    static RationalFunction polynomial(Polynomial p);
    /// 1 / (z - p)
    static RationalFunction simple_pole(Complex p);

    const Polynomial& numerator() const noexcept { return numerator_; }
    const std::vector<Pole>& poles() const noexcept { return poles_; }
    Complex scale() const noexcept { return scale_; }

    bool is_zero() const noexcept { return numerator_.is_zero() || scale_ == Complex{}; }
    int numerator_degree() const noexcept { return numerator_.degree(); }
    int denominator_degree() const noexcept;
    /// Expanded, monic.
    Polynomial denominator() const;

    /// Order of the declared pole near `z`, if any.
    std::optional<int> pole_order_at(Complex z, double tol) const;

    /// Taylor coefficients of (z - p)^m f(z) at a declared pole p of order m,
    /// i.e. the Laurent coefficients of f starting at (z - p)^{-m}.
    std::vector<Complex> laurent_at_pole(std::size_t pole_index, int terms) const;

    /// Taylor coefficients of f at a point that is not a pole.
    std::vector<Complex> taylor_at(Complex z, int terms) const;

    /// The function with every coefficient conjugated: z ↦ conj(f(conj z)).
    RationalFunction conjugated() const;
    RationalFunction scaled(Complex s) const;

    friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);

private:
    struct Unchecked {};
    RationalFunction(Unchecked, Polynomial numerator, std::vector<Pole> poles, Complex scale);

    Polynomial numerator_;
    std::vector<Pole> poles_;
    Complex scale_ = 1.0;
};

/// R(z) dz in the affine chart of one component.
struct RationalOneForm {
    RationalFunction coefficient;
};

/// f(z); the value at infinity follows the degree rule.
/// Throws PoleEvaluation at a pole and InfiniteValue when f has a pole at infinity.
Complex evaluate(const RationalFunction& f, const SpherePoint& z);

/// Order of f at a point: positive for a zero, negative for a pole, 0 otherwise.
/// Vanishing of numerator Taylor coefficients is judged against their magnitudes.
int order_at(const RationalFunction& f, const SpherePoint& z, double tol);

/// Order of the form R(z)dz at a point (the chart change at infinity adds -2).
int order_at(const RationalOneForm& w, const SpherePoint& z, double tol);

/// Residue at a declared pole or at infinity. Throws NotAPole otherwise.
Complex residue(const RationalOneForm& w, const SpherePoint& p);

/// Residue, or zero when `p` is a regular point of the form.
Complex residue_or_zero(const RationalOneForm& w, const SpherePoint& p);

/// Sum over all finite poles plus the residue at infinity.
Complex residue_sum(const RationalOneForm& w);

/// Largest residue magnitude over all finite poles and infinity.
double max_residue_magnitude(const RationalOneForm& w);

/// Coefficient-wise comparison after matching pole structure. Relative to the
/// largest scaled numerator coefficient.
bool approx_equal(const RationalFunction& a, const RationalFunction& b, double rel);

/// Local parameter attached to an essential point.
enum class LocalParameter {
    Affine,        ///< k = z, only at infinity
    InversePole,   ///< k = 1/(z - p), only at a finite point p
};

/// The ε² of the expansion Ω = (ε²/k + O(1/k²)) d(k⁻¹) at P.
///
/// Writing w = 1/k for the local coordinate, Ω = (ε² w + O(w²)) dw, so
///   at ∞ with k = z:          ε² = -lim z³ R(z)
///   at p with k = 1/(z - p):  ε² = lim R(z)/(z - p)
/// The finite case is not exercised by any worked example.
/// Throws WrongVanishingOrder unless Ω has a simple zero at P.
Complex epsilon_squared(const RationalOneForm& w, const SpherePoint& P, LocalParameter k);

}  // namespace bacoord
