#include <cmath>
#include <numeric>

#include "bacoord/curve/validation.hpp"
#include "bacoord/errors.hpp"
#include "bacoord/ratfun/tolerances.hpp"

namespace bacoord {

namespace {

struct Marked {
    CurvePoint point;
    std::string label;
};

std::vector<Marked> marked_points(const SpectralData& data) {
    std::vector<Marked> out;
    for (const auto& e : data.essential_points) out.push_back({e.point, "P" + std::to_string(e.flow_index)});
    for (const auto& q : data.q_points) out.push_back({q.point, "Q" + std::to_string(q.coordinate_index)});
    for (std::size_t k = 0; k < data.normalization.size(); ++k)
        out.push_back({data.normalization[k].point, "R" + std::to_string(k + 1)});
    for (std::size_t k = 0; k < data.psi_poles.size(); ++k)
        out.push_back({data.psi_poles[k], "γ" + std::to_string(k + 1)});
    return out;
}

std::vector<CurvePoint> node_points(const SpectralData& data) {
    std::vector<CurvePoint> out;
    for (const auto& n : data.nodes) {
        out.push_back(n.p);
        out.push_back(n.q);
    }
    return out;
}

bool contains(const std::vector<CurvePoint>& set, const CurvePoint& x, double tol) {
    for (const auto& y : set)
        if (same_point(x, y, tol)) return true;
    return false;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : "; ") + s;
    return out;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
}

// Points where a Möbius map and a local parameter are compared.
const Complex kProbe[] = {{0.3712, 0.2209}, {-1.2817, 0.7933}, {2.0561, -0.6127}};

bool involutive(const Involution& inv, double tol, std::string& detail) {
    for (std::size_t c = 0; c < inv.component_map.size(); ++c) {
        const std::size_t image = inv.component_map[c];
        if (inv.component_map[image] != c) {
            detail = "component map is not an involution";
            return false;
        }
        if (!is_identity(compose(inv.maps[image], inv.maps[c]), tol)) {
            detail = "map on component " + std::to_string(c + 1) + " composed with its image map is not the identity";
            return false;
        }
    }
    return true;
}

}  // namespace

std::optional<NodeImage> node_image(const SpectralData& data, const Involution& inv, std::size_t node) {
    const double tol = tolerances().point;
    const CurvePoint p = inv(data.nodes[node].p);
    const CurvePoint q = inv(data.nodes[node].q);
    for (std::size_t m = 0; m < data.nodes.size(); ++m) {
        const Node& n = data.nodes[m];
        if (same_point(n.p, p, tol) && same_point(n.q, q, tol)) return NodeImage{m, n.lambda};
        if (same_point(n.p, q, tol) && same_point(n.q, p, tol)) return NodeImage{m, 1.0 / n.lambda};
    }
    return std::nullopt;
}

ValidationReport validate_structure(const SpectralData& data) {
    ValidationReport rep;
    const double tol = tolerances().point;
    char buf[160];

    const std::size_t unknowns = data.component_count() + data.psi_poles.size();
    const std::size_t conditions = data.nodes.size() + data.normalization.size();
    std::snprintf(buf, sizeof buf, "%zu unknowns (components + γ) vs %zu conditions (nodes + R)", unknowns, conditions);
    rep.add("square-system count", unknowns == conditions, buf);

    const int ga = data.arithmetic_genus();
    const int l = static_cast<int>(data.normalization.size());
    std::snprintf(buf, sizeof buf, "#γ = %zu, g_a + l - 1 = %d + %d - 1 = %d", data.psi_poles.size(), ga, l, ga + l - 1);
    rep.add("arithmetic-genus divisor count", static_cast<int>(data.psi_poles.size()) == ga + l - 1, buf);

    std::vector<std::size_t> parent(data.component_count());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    for (const auto& n : data.nodes) parent[find_root(parent, n.p.component)] = find_root(parent, n.q.component);
    std::size_t pieces = 0;
    for (std::size_t c = 0; c < parent.size(); ++c) pieces += find_root(parent, c) == c;
    std::snprintf(buf, sizeof buf, "%zu connected piece(s)", pieces);
    rep.add("curve connected", pieces == 1, buf);

    const auto marked = marked_points(data);
    std::vector<std::string> clashes;
    for (std::size_t i = 0; i < marked.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (same_point(marked[i].point, marked[j].point, tol))
                clashes.push_back(marked[j].label + " = " + marked[i].label + " at " + data.describe(marked[i].point));
    rep.add("marked points distinct", clashes.empty(), join(clashes));

    const auto nodes = node_points(data);
    std::vector<std::string> node_clash;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (same_point(nodes[i], nodes[j], tol)) node_clash.push_back(data.describe(nodes[i]));
    rep.add("node points distinct", node_clash.empty(), join(node_clash));

    for (const char kind : {'P', 'Q', 'R', 'g'}) {
        std::vector<std::string> hits;
        for (const auto& m : marked) {
            const bool match = kind == 'g' ? m.label.rfind("γ", 0) == 0 : m.label[0] == kind;
            if (match && contains(nodes, m.point, tol)) hits.push_back(m.label + " at " + data.describe(m.point));
        }
        const std::string name = kind == 'g' ? "γ" : std::string(1, kind);
        rep.add(name + " distinct from node points", hits.empty(), join(hits));
    }

    for (std::size_t c = 0; c < data.component_count(); ++c) {
        if (data.essential_points_on(c).empty() && data.psi_poles_on(c).empty())
            rep.add({"component carries P or γ", CheckStatus::Warn,
                     "the section is constant on " + data.components[c] + " (unusual; supported)"});
    }

    if (!data.sigma) {
        rep.add("σ present", false, "no holomorphic involution given");
        return rep;
    }
    const Involution& sigma = *data.sigma;

    std::vector<std::string> moved_p, moved_q, bad_k, lost_nodes;
    for (const auto& e : data.essential_points) {
        const CurvePoint image = sigma(e.point);
        if (!same_point(image, e.point, tol))
            moved_p.push_back("P" + std::to_string(e.flow_index) + " -> " + data.describe(image));
        const std::size_t c = e.point.component;
        bool ok = sigma.component_map[c] == c;
        for (Complex z : kProbe) {
            if (!ok) break;
            try {
                const Complex k = e.local_coordinate(z);
                const Complex ks = e.local_coordinate(sigma.maps[c](z));
                ok = std::abs(k + ks) <= tol * (1.0 + std::abs(k));
            } catch (const PoleEvaluation&) {
                ok = false;
            }
        }
        if (!ok) bad_k.push_back("P" + std::to_string(e.flow_index));
    }
    for (const auto& q : data.q_points) {
        const CurvePoint image = sigma(q.point);
        if (!same_point(image, q.point, tol))
            moved_q.push_back("Q" + std::to_string(q.coordinate_index) + " -> " + data.describe(image));
    }
    for (std::size_t k = 0; k < data.nodes.size(); ++k)
        if (!node_image(data, sigma, k)) lost_nodes.push_back("node " + std::to_string(k + 1));

    rep.add("σ fixes P", moved_p.empty(), join(moved_p));
    rep.add("σ fixes Q", moved_q.empty(), join(moved_q));
    rep.add("σ(k_j) = −k_j", bad_k.empty(), bad_k.empty() ? "" : "fails at " + join(bad_k));
    rep.add("σ maps node set to itself", lost_nodes.empty(),
            lost_nodes.empty() ? "" : "no σ-image for " + join(lost_nodes));
    return rep;
}

ValidationReport check_involutions(const SpectralData& data) {
    ValidationReport rep;
    const double tol = tolerances().point;
    std::string detail;

    if (data.sigma) rep.add("σ involutive", involutive(*data.sigma, tol, detail), detail);

    static const char* const kTauRules[] = {"τ involutive",        "τ fixes P",           "τ fixes Q",
                                            "τ maps R to itself",  "τ maps γ to itself",  "τ maps node set to itself",
                                            "conj(d) = d_τ",       "conj(λ) = λ_τ",       "τ*Ω = conj Ω"};
    if (!data.tau) {
        for (const char* rule : kTauRules) rep.add({rule, CheckStatus::NotApplicable, "no τ given"});
        return rep;
    }
    const Involution& tau = *data.tau;
    detail.clear();
    rep.add("τ involutive", involutive(tau, tol, detail), detail);

    std::vector<std::string> bad;
    for (const auto& e : data.essential_points)
        if (!same_point(tau(e.point), e.point, tol)) bad.push_back("P" + std::to_string(e.flow_index));
    rep.add("τ fixes P", bad.empty(), join(bad));
    bad.clear();
    for (const auto& q : data.q_points)
        if (!same_point(tau(q.point), q.point, tol)) bad.push_back("Q" + std::to_string(q.coordinate_index));
    rep.add("τ fixes Q", bad.empty(), join(bad));

    bad.clear();
    double d_residual = 0.0;
    bool d_paired = true;
    for (std::size_t k = 0; k < data.normalization.size(); ++k) {
        const auto& r = data.normalization[k];
        const CurvePoint image = tau(r.point);
        std::optional<std::size_t> match;
        for (std::size_t m = 0; m < data.normalization.size() && !match; ++m)
            if (same_point(data.normalization[m].point, image, tol)) match = m;
        if (!match) {
            bad.push_back("R" + std::to_string(k + 1));
            d_paired = false;
            continue;
        }
        const Complex dt = data.normalization[*match].value;
        d_residual = std::max(d_residual, std::abs(std::conj(r.value) - dt) / (std::abs(r.value) + std::abs(dt)));
    }
    rep.add("τ maps R to itself", bad.empty(), join(bad));
    if (d_paired) rep.add("conj(d) = d_τ", d_residual <= tol, "", d_residual);
    else rep.add({"conj(d) = d_τ", CheckStatus::NotApplicable, "R set is not τ-invariant"});

    bad.clear();
    for (std::size_t k = 0; k < data.psi_poles.size(); ++k) {
        bool found = false;
        for (const auto& g : data.psi_poles) found = found || same_point(tau(data.psi_poles[k]), g, tol);
        if (!found) bad.push_back("γ" + std::to_string(k + 1));
    }
    rep.add("τ maps γ to itself", bad.empty(), join(bad));

    bad.clear();
    double l_residual = 0.0;
    for (std::size_t k = 0; k < data.nodes.size(); ++k) {
        const auto image = node_image(data, tau, k);
        if (!image) {
            bad.push_back("node " + std::to_string(k + 1));
            continue;
        }
        const Complex lam = data.nodes[k].lambda;
        l_residual = std::max(l_residual,
                              std::abs(std::conj(lam) - image->lambda) / (std::abs(lam) + std::abs(image->lambda)));
    }
    rep.add("τ maps node set to itself", bad.empty(), join(bad));
    if (bad.empty()) rep.add("conj(λ) = λ_τ", l_residual <= tol, "", l_residual);
    else rep.add({"conj(λ) = λ_τ", CheckStatus::NotApplicable, "node set is not τ-invariant"});

    if (!data.parameters_bound()) {
        rep.add({"τ*Ω = conj Ω", CheckStatus::NotApplicable, "Ω has unbound parameters"});
        return rep;
    }
    bad.clear();
    for (std::size_t c = 0; c < data.component_count(); ++c) {
        const RationalOneForm pulled = pullback(tau.maps[c], data.omega_form(tau.component_map[c]));
        if (!approx_equal(pulled.coefficient, data.omega_form(c).coefficient, tol)) bad.push_back(data.components[c]);
    }
    rep.add("τ*Ω = conj Ω", bad.empty(), bad.empty() ? "" : "differs on " + join(bad));
    return rep;
}

}  // namespace bacoord
