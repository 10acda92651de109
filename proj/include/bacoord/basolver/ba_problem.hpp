#pragma once

#include <string>
#include <vector>

#include "bacoord/curve/spectral_data.hpp"

namespace bacoord {

/// u = (u^1, ..., u^n). Real in every shipped use; complex values are accepted.
using FlowPoint = std::vector<Complex>;

/// One unknown of the ansatz: the constant term of a component, or the
/// coefficient of 1/(z - γ) for a ψ pole on it.
struct Unknown {
    std::size_t component = 0;
    std::optional<std::size_t> psi_pole;
    std::string label;
};

/// Dense linear system M c = rhs, row-major.
struct LinearSystem {
    std::size_t size = 0;
    std::vector<Complex> matrix;
    std::vector<Complex> rhs;
    std::vector<std::string> row_labels;

    Complex& at(std::size_t row, std::size_t col) { return matrix[row * size + col]; }
    Complex at(std::size_t row, std::size_t col) const { return matrix[row * size + col]; }
};

/// Coefficients of the ansatz at a flow point, optionally with their first and
/// second u-derivatives.
struct BASolution {
    FlowPoint u;
    std::vector<Complex> c;
    /// first[i] = ∂_i c; empty unless requested.
    std::vector<std::vector<Complex>> first;
    /// second[i * n + j] = ∂_i ∂_j c; empty unless requested.
    std::vector<std::vector<Complex>> second;
    /// Reciprocal condition estimate of the row-equilibrated matrix.
    double rcond = 0.0;
    /// max_row |M c - rhs| / (1 + max|c|).
    double residual = 0.0;

    int derivative_order() const noexcept { return second.empty() ? (first.empty() ? 0 : 1) : 2; }
};

enum class DerivativeMode { Analytic, FiniteDifference };

/// A multi-index with |α| ≤ 2, given as the list of differentiated flows:
/// {} for ψ, {i} for ∂_i ψ, {i, j} for ∂_i ∂_j ψ.
///
/// Flow indices in this header are 0-based throughout: flow i is u^{i+1} and the
/// essential point with flow_index i + 1.
using DerivativeIndex = std::vector<int>;

/// The Baker–Akhiezer section of a spectral-data instance.
///
/// On component c the section is
///     ψ_c(u, z) = E_c(u, z) · r_c(z),
///     E_c(u, z) = exp(Σ_{P_j on c} u^j k_j(z)),
///     r_c(z)    = c_0 + Σ_{γ on c} c_γ / (z - γ),
/// where k_j = z at P_j = ∞ and k_j = 1/(z - p) at a finite P_j = p.
/// The coefficients are fixed by one row per node,
///     E_p(a) r_p(a) - λ E_q(b) r_q(b) = 0,
/// and one row per normalization point, E(R) r(R) = d.
///
/// Every row is a short list of point evaluations. Differentiating in u^i only
/// multiplies each evaluation by k_i at its point (when P_i lies on that
/// component), so the derivative systems reuse the factorization of M:
///     M ∂_i c      = -(∂_i M) c
///     M ∂_i ∂_j c  = -(∂_i ∂_j M) c - (∂_i M) ∂_j c - (∂_j M) ∂_i c.
///
/// The object is immutable once built and may be shared across threads.
class BakerAkhiezerProblem {
public:
    /// Binds the data (parameters of Ω need not be bound). Throws
    /// EssentialAtConstraint if a node or normalization point sits on an
    /// essential point, and InvariantError if the system is not square.
    explicit BakerAkhiezerProblem(SpectralData data);

    const SpectralData& data() const noexcept { return data_; }
    int dimension() const noexcept { return data_.dimension; }
    const std::vector<Unknown>& unknowns() const noexcept { return unknowns_; }

    LinearSystem assemble(const FlowPoint& u) const;

    /// Throws SingularSystem when the reciprocal condition estimate is below 1e-10.
    BASolution solve(const FlowPoint& u, int derivative_order = 0) const;

    /// ψ(u, Q). Throws PoleEvaluation at a ψ pole and EssentialPointError at an
    /// essential point.
    Complex psi(const BASolution& s, const CurvePoint& q) const;

    /// A u-derivative of ψ at Q from the coefficient derivatives in `s`.
    Complex psi_derivative(const BASolution& s, const CurvePoint& q, const DerivativeIndex& alpha) const;

    /// h_j(u) = lim_{z → P_j} ψ(u, z) exp(-u^j k_j(z)).
    Complex h(const BASolution& s, int j) const;

    /// ∂_i h_j from the coefficient derivatives in `s`.
    Complex h_derivative(const BASolution& s, int j, int i) const;

    /// ∂_i ψ(u, z) = E_c(u, z) ρ_{c,i}(z); returns the rational factor ρ_{c,i}.
    RationalFunction derivative_factor(const BASolution& s, std::size_t component, int i) const;

    /// E_c(u, z). Throws EssentialPointError at an essential point of c.
    Complex exponential(const FlowPoint& u, const CurvePoint& z) const;

private:
    struct Term {
        std::size_t component;
        SpherePoint z;
        Complex factor;
    };
    struct Row {
        std::vector<Term> terms;
        Complex rhs;
        std::string label;
    };

    /// ln E_c and k_i values at a point; `exclude_flow` (or -1) drops one flow.
    struct PointData {
        Complex log_e;
        std::vector<Complex> kappa;  // n entries, zero for flows off the component
    };
    PointData point_data(const FlowPoint& u, const CurvePoint& z, int exclude_flow) const;
    Complex rational_part(const std::vector<Complex>& c, const CurvePoint& z) const;
    Complex jet(const BASolution& s, const CurvePoint& z, const DerivativeIndex& alpha, int exclude_flow) const;
    /// ∂^α M, row-major.
    std::vector<Complex> matrix(const FlowPoint& u, const DerivativeIndex& alpha) const;
    const EssentialPoint& flow(int i) const { return data_.essential(i + 1); }

    SpectralData data_;
    std::vector<Unknown> unknowns_;
    std::vector<std::size_t> constant_unknown_;  // per component
    std::vector<std::size_t> pole_unknown_;      // per ψ pole
    std::vector<Row> rows_;
};

/// ∂^α ψ(u, Q) by either differentiating the linear system or by central
/// differences with step h = 1e-5 · max(1, |u|).
Complex psi_partial(const BakerAkhiezerProblem& problem, const FlowPoint& u, const CurvePoint& q,
                    const DerivativeIndex& alpha, DerivativeMode mode = DerivativeMode::Analytic);

/// Finite-difference step used by psi_partial.
double finite_difference_step(const FlowPoint& u);

/// ω_ij restricted to the components of the curve.
struct OmegaIJ {
    int i = 0;
    int j = 0;
    std::vector<RationalOneForm> forms;  // one per component
};

/// ω_ij restricted to each component:
///     ω^k_ij = ρ_{k,i}(z) · ρ_{σk,j}(σ_k z) · R_k(z) dz,
/// using E_k(z) E_{σk}(σ_k z) = 1. No exponential is evaluated along z.
/// Requires derivatives of order ≥ 1 in `s`. Throws InvolutionMismatch when the
/// exponential factors do not cancel under σ, UnboundParameter when Ω is not bound.
OmegaIJ omega_ij_form(const BakerAkhiezerProblem& problem, const BASolution& s, int i, int j);

}  // namespace bacoord
