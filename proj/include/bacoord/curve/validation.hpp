#pragma once

#include <limits>
#include <string>
#include <vector>

#include "bacoord/curve/spectral_data.hpp"

namespace bacoord {

enum class CheckStatus { Pass, Fail, Warn, NotApplicable };

const char* to_string(CheckStatus s) noexcept;

struct CheckEntry {
    std::string rule;
    CheckStatus status = CheckStatus::Pass;
    std::string detail;
    double residual = std::numeric_limits<double>::quiet_NaN();  // NaN when the rule is not numeric
};

struct ValidationReport {
    std::vector<CheckEntry> entries;

    void add(std::string rule, bool ok, std::string detail = {},
             double residual = std::numeric_limits<double>::quiet_NaN());
    void add(CheckEntry e) { entries.push_back(std::move(e)); }
    void append(const ValidationReport& other);

    /// True when no entry failed. Warnings and inapplicable rules do not count.
    bool passed() const noexcept;
    const CheckEntry* find(const std::string& rule) const noexcept;
    /// First failing entry, if any.
    const CheckEntry* first_failure() const noexcept;

    /// `[{rule, status, detail, residual}]`, residual null when not numeric.
    std::string to_json(int indent = 2) const;
    std::string to_text() const;
};

/// Counting rules, distinctness of marked points, connectivity and the
/// conditions tying σ to the essential points, Q points and nodes.
ValidationReport validate_structure(const SpectralData& data);

/// Zeros of Ω at P, γ and σγ; poles at Q, R, σR and node points; nothing else.
/// Throws UnboundParameter.
ValidationReport check_form_divisor(const SpectralData& data);

/// Equal residues of Ω at the Q points and the weighted node conditions
///     λ λ_σ Res_a Ω_p + Res_b Ω_q = 0,
/// with λ_σ the gluing constant of the node at (σa, σb). Throws UnboundParameter.
ValidationReport check_residue_conditions(const SpectralData& data);

/// Involutivity of σ and τ, and the reality hypotheses on τ.
ValidationReport check_involutions(const SpectralData& data);

/// Every check that applies to the data. Form and residue checks are reported
/// as not applicable while a parameter is unbound.
ValidationReport validate_all(const SpectralData& data);

/// The common value of Res_Q Ω over the Q points (first Q point's residue).
Complex q_residue(const SpectralData& data);

struct NodeImage {
    std::size_t node;
    /// λ_σ as seen from the original node's orientation (1/λ' when the image is stored reversed).
    Complex lambda;
};

/// The node at the image of `node` under an involution, if the node set is closed under it.
std::optional<NodeImage> node_image(const SpectralData& data, const Involution& inv, std::size_t node);

/// λ λ_σ Res_a Ω_p + Res_b Ω_q for one node, and the scale it is measured against.
struct NodeResidueSum {
    Complex value;
    double scale;
};
NodeResidueSum node_residue_sum(const SpectralData& data, std::size_t node);

/// Solve the first node condition that constrains `name`, bind the value, and
/// confirm the remaining conditions. Throws NoConstraint when no node condition
/// depends on the parameter, Inconsistent when the solved value violates another
/// condition.
Complex solve_scale_parameter(SpectralData& data, const std::string& name);

/// Solve every parameter marked "solve", one at a time.
void solve_all_parameters(SpectralData& data);

}  // namespace bacoord
