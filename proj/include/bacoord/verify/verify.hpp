#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bacoord/basolver/ba_problem.hpp"

namespace bacoord {

/// Coordinates and their first derivatives at one flow point.
struct CoordinateSample {
    FlowPoint u;
    bool solved = false;
    std::string gap_reason;
    std::vector<Complex> x;
    /// jacobian[i][k] = ∂x^k / ∂u^i, one row per flow.
    std::vector<std::vector<Complex>> jacobian;
    /// H_i² = Σ_k (∂_i x^k)²
    std::vector<Complex> H2;
};

CoordinateSample coordinates(const BakerAkhiezerProblem& problem, const FlowPoint& u);

/// max_{i≠j} |Σ_k ∂_i x^k ∂_j x^k| / max_i |H_i²|; 0 for n = 1.
double orthogonality_residual(const CoordinateSample& sample);

struct RealityResidual {
    bool applicable = false;
    std::string reason;
    /// max_k |Im x^k| / (1 + max_k |x^k|)
    double imaginary = 0.0;
    /// max over probes of |ψ(P) - conj ψ(τP)| / (1 + |ψ(P)|)
    double probe = 0.0;
};

/// Throws NoTau when the data carries no τ. Complex u is reported as not applicable.
RealityResidual reality_residual(const BakerAkhiezerProblem& problem, const FlowPoint& u, std::uint64_t seed,
                                 int probes = 10);

/// Random point of the curve at distance ≥ 0.05 from every ψ pole, essential point and node point.
CurvePoint random_curve_point(const SpectralData& data, std::mt19937_64& rng);

/// Empty when P_j = ∞ and Q_j = 0 share a component Γ_j of their own for every j and
/// every node glues equal coordinates; otherwise the reason it fails.
std::optional<std::string> egorov_shape_violation(const SpectralData& data);

struct EgorovData {
    std::vector<Complex> epsilon2;
    std::vector<Complex> h;
    std::vector<Complex> H2;
    /// The common Q-residue ρ of Ω; the identity checked is H_j² = ε_j² h_j² / ρ.
    Complex rho;
    /// beta[i * n + j] = ∂_i H_j / H_i with H_j = sqrt(ε_j²/ρ) h_j, zero on the diagonal.
    std::vector<Complex> beta;
    double lame_residual = 0.0;
    double beta_residual = 0.0;
};

/// Throws NotEgorovShape, ZeroLame when some h_j vanishes, SingularSystem from the solve.
EgorovData egorov_checks(const BakerAkhiezerProblem& problem, const FlowPoint& u);

struct EpdResidual {
    Complex value;
    double normalized = 0.0;
};

/// ∂_i∂_j ψ - ∂_j(log h_i) ∂_i ψ - ∂_i(log h_j) ∂_j ψ at q, for i ≠ j, with h from the
/// expansion at the essential points. Normalized by the largest of the three terms.
/// Needs second derivatives in `s`. Throws ZeroLame when h_i or h_j vanishes.
EpdResidual epd_residual(const BakerAkhiezerProblem& problem, const BASolution& s, int i, int j, const CurvePoint& q);

struct NodeCancellation {
    double node = 0.0;    ///< max over nodes of |Res_a ω^p + Res_b ω^q|
    double global = 0.0;  ///< max over components of |Σ Res ω^k|
    double q_identity = 0.0;  ///< |Σ_s Res_{Q_s} ω - ρ Σ_s ∂_i x^s ∂_j x^s|
};

/// All three are divided by the largest residue magnitude of ω_ij on any component.
NodeCancellation node_cancellation_residual(const BakerAkhiezerProblem& problem, const BASolution& s, int i, int j);

// ---------------------------------------------------------------------------

struct GridAxis {
    double min = -1.0;
    double max = 1.0;
    int count = 21;
};

struct GridSpec {
    std::vector<GridAxis> axes;

    /// "min:max:count,min:max:count,..."; throws std::invalid_argument.
    static GridSpec parse(const std::string& text);
    static GridSpec uniform(int dimension, double min, double max, int count);
    std::size_t size() const;
    /// Sample `index` in row-major order, last axis fastest.
    FlowPoint point(std::size_t index) const;
};

struct CheckTolerances {
    double orthogonality = 1e-8;
    double reality = 1e-8;
    double probe = 1e-9;
    double lame = 1e-8;
    double beta = 1e-8;
    double epd = 1e-6;
    double residue = 1e-10;
};

struct CheckSummary {
    std::string name;
    bool applicable = false;
    std::string note;
    double tolerance = 0.0;
    double max_residual = 0.0;
    FlowPoint worst_u;
    std::size_t samples = 0;
    std::size_t gaps = 0;

    bool passed() const { return !applicable || (samples > 0 && max_residual < tolerance); }
};

struct VerificationReport {
    std::vector<CheckSummary> checks;
    std::size_t grid_size = 0;
    std::uint64_t seed = 0;

    bool passed() const;
    const CheckSummary* find(const std::string& name) const;
    std::string to_json(int indent = 2) const;
    std::string to_text() const;
};

/// Check names, in report order.
const std::vector<std::string>& check_names();

/// Evaluates every check at every grid sample. Sample k draws its random probes from
/// seed and k alone, so the result does not depend on scheduling. Uses OpenMP.
VerificationReport run_report(const BakerAkhiezerProblem& problem, const GridSpec& grid, std::uint64_t seed,
                              const CheckTolerances& tol = {});

/// Single-threaded reference for run_report; the two agree bit for bit.
VerificationReport run_report_serial(const BakerAkhiezerProblem& problem, const GridSpec& grid, std::uint64_t seed,
                                     const CheckTolerances& tol = {});

}  // namespace bacoord
