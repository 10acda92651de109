#include <algorithm>
#include <cmath>
#include <cstdio>

#include "bacoord/curve/validation.hpp"
#include "bacoord/errors.hpp"
#include "bacoord/ratfun/tolerances.hpp"

namespace bacoord {

namespace {

std::string fmt(Complex z) { return SpherePoint(z).to_string(); }

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : "; ") + s;
    return out;
}

struct Expected {
    SpherePoint location;
    int multiplicity;
};

void add_expected(std::vector<Expected>& set, const SpherePoint& z, double tol) {
    for (auto& e : set)
        if (approx_equal(e.location, z, tol)) {
            ++e.multiplicity;
            return;
        }
    set.push_back({z, 1});
}

void require_bound(const SpectralData& data) {
    const auto unbound = data.unbound_parameters();
    if (!unbound.empty()) throw UnboundParameter("parameter '" + unbound.front() + "' is marked solve");
}

}  // namespace

ValidationReport check_form_divisor(const SpectralData& data) {
    require_bound(data);
    const double tol = tolerances().point;
    const Involution* sigma = data.sigma ? &*data.sigma : nullptr;

    std::vector<std::string> bad_p, bad_g, bad_q, bad_r, bad_node, extra_poles, extra_zeros;
    for (std::size_t c = 0; c < data.component_count(); ++c) {
        const RationalOneForm w = data.omega_form(c);
        const std::string& name = data.components[c];

        std::vector<Expected> zeros, poles;
        for (const auto& e : data.essential_points) {
            if (e.point.component != c) continue;
            add_expected(zeros, e.point.location, tol);
            const int ord = order_at(w, e.point.location, tol);
            if (ord != 1)
                bad_p.push_back("P" + std::to_string(e.flow_index) + " on " + name + " has order " + std::to_string(ord));
        }
        for (std::size_t k = 0; k < data.psi_poles.size(); ++k) {
            std::vector<CurvePoint> targets{data.psi_poles[k]};
            if (sigma) targets.push_back((*sigma)(data.psi_poles[k]));
            for (const auto& g : targets)
                if (g.component == c) add_expected(zeros, g.location, tol);
        }
        for (const auto& z : zeros) {
            const bool at_p = std::any_of(data.essential_points.begin(), data.essential_points.end(), [&](const auto& e) {
                return e.point.component == c && approx_equal(e.point.location, z.location, tol);
            });
            if (at_p) continue;
            const int ord = order_at(w, z.location, tol);
            if (ord < z.multiplicity)
                bad_g.push_back(z.location.to_string() + " on " + name + " has order " + std::to_string(ord));
        }

        const auto expect_pole = [&](const SpherePoint& z, std::vector<std::string>& bad, const std::string& label) {
            add_expected(poles, z, tol);
            const int ord = order_at(w, z, tol);
            if (ord > -1) bad.push_back(label + " at " + z.to_string() + " on " + name + " has order " + std::to_string(ord));
        };
        for (const auto& q : data.q_points)
            if (q.point.component == c) expect_pole(q.point.location, bad_q, "Q" + std::to_string(q.coordinate_index));
        for (std::size_t k = 0; k < data.normalization.size(); ++k) {
            const CurvePoint& r = data.normalization[k].point;
            if (r.component == c) expect_pole(r.location, bad_r, "R" + std::to_string(k + 1));
            if (sigma) {
                const CurvePoint sr = (*sigma)(r);
                if (sr.component == c) expect_pole(sr.location, bad_r, "σR" + std::to_string(k + 1));
            }
        }
        for (std::size_t k = 0; k < data.nodes.size(); ++k) {
            for (const CurvePoint& x : {data.nodes[k].p, data.nodes[k].q})
                if (x.component == c) expect_pole(x.location, bad_node, "node " + std::to_string(k + 1));
        }

        const auto expected_pole = [&](const SpherePoint& z) {
            return std::any_of(poles.begin(), poles.end(), [&](const Expected& e) { return approx_equal(e.location, z, tol); });
        };
        for (const Pole& p : w.coefficient.poles())
            if (!expected_pole(p.location)) extra_poles.push_back(fmt(p.location) + " on " + name);
        const int ord_inf = order_at(w, SpherePoint::infinity(), tol);
        if (ord_inf < 0 && !expected_pole(SpherePoint::infinity())) extra_poles.push_back("inf on " + name);

        int total = w.coefficient.numerator_degree() + std::max(0, ord_inf);
        int accounted = 0;
        for (const auto& z : zeros) accounted += std::max(0, order_at(w, z.location, tol));
        if (accounted < total)
            extra_zeros.push_back(std::to_string(total - accounted) + " unexpected zero(s) on " + name);
    }

    ValidationReport rep;
    rep.add("Ω vanishes at P", bad_p.empty(), join(bad_p));
    rep.add("Ω vanishes at γ and σγ", bad_g.empty(), join(bad_g));
    rep.add("Ω has poles at Q", bad_q.empty(), join(bad_q));
    rep.add("Ω has poles at R and σR", bad_r.empty(), join(bad_r));
    rep.add("Ω has poles at node points", bad_node.empty(), join(bad_node));
    rep.add("no other poles", extra_poles.empty(), join(extra_poles));
    rep.add("no other zeros", extra_zeros.empty(), join(extra_zeros));
    return rep;
}

Complex q_residue(const SpectralData& data) {
    const QPoint& q = data.q_point(1);
    return residue_or_zero(data.omega_form(q.point.component), q.point.location);
}

NodeResidueSum node_residue_sum(const SpectralData& data, std::size_t node) {
    if (!data.sigma) throw InvariantError("σ present", "node residue conditions need σ");
    const auto image = node_image(data, *data.sigma, node);
    if (!image)
        throw InvariantError("σ maps node set to itself", "node " + std::to_string(node + 1) + " has no σ-image");
    const Node& n = data.nodes[node];
    const Complex a = n.lambda * image->lambda * residue_or_zero(data.omega_form(n.p.component), n.p.location);
    const Complex b = residue_or_zero(data.omega_form(n.q.component), n.q.location);
    return {a + b, std::max(std::abs(a), std::abs(b))};
}

ValidationReport check_residue_conditions(const SpectralData& data) {
    require_bound(data);
    const double tol = tolerances().residual;
    ValidationReport rep;
    char buf[200];

    std::vector<Complex> res;
    double largest = 0.0;
    for (int j = 1; j <= data.dimension; ++j) {
        const QPoint& q = data.q_point(j);
        res.push_back(residue_or_zero(data.omega_form(q.point.component), q.point.location));
        largest = std::max(largest, std::abs(res.back()));
    }
    double spread = 0.0;
    for (Complex r : res) spread = std::max(spread, std::abs(r - res.front()));
    const double q_res = largest > 0.0 ? spread / largest : 0.0;
    std::string values;
    for (std::size_t k = 0; k < res.size(); ++k) values += (k ? ", " : "") + fmt(res[k]);
    rep.add("Q-residues equal", largest > 0.0 && q_res <= tol, "Res_Q Ω = (" + values + ")", q_res);

    const Complex rho = res.front();
    if (std::abs(rho - 1.0) <= tol) {
        rep.add("Q-residue normalization", true, "common residue is 1");
    } else {
        std::snprintf(buf, sizeof buf, "common residue ρ = %s; Ω/ρ is the normalized form and H² = ε²h²/ρ",
                      fmt(rho).c_str());
        rep.add({"Q-residue normalization", CheckStatus::Warn, buf});
    }

    double worst = 0.0;
    std::vector<std::string> failing;
    bool have_images = true;
    for (std::size_t k = 0; k < data.nodes.size(); ++k) {
        try {
            const auto s = node_residue_sum(data, k);
            const double r = s.scale > 0.0 ? std::abs(s.value) / s.scale : 0.0;
            worst = std::max(worst, r);
            if (!(r <= tol)) failing.push_back("node " + std::to_string(k + 1) + ": " + fmt(s.value));
        } catch (const InvariantError& e) {
            have_images = false;
            failing.push_back(e.what());
        }
    }
    if (data.nodes.empty()) {
        rep.add({"node residue condition", CheckStatus::NotApplicable, "no nodes"});
    } else {
        rep.add("node residue condition", failing.empty(), join(failing), have_images ? worst : std::nan(""));
    }
    return rep;
}

ValidationReport validate_all(const SpectralData& data) {
    ValidationReport rep = validate_structure(data);
    if (data.parameters_bound()) {
        rep.append(check_form_divisor(data));
        rep.append(check_residue_conditions(data));
    } else {
        rep.add({"Ω divisor and residue conditions", CheckStatus::NotApplicable,
                 "unbound parameter(s); solve them first"});
    }
    rep.append(check_involutions(data));
    return rep;
}

Complex solve_scale_parameter(SpectralData& data, const std::string& name) {
    if (!data.parameters.count(name)) throw UnboundParameter("no parameter named '" + name + "'");
    const double tol = tolerances().point;

    std::optional<Complex> value;
    for (std::size_t k = 0; k < data.nodes.size() && !value; ++k) {
        // The node condition is affine in a multiplicative scale parameter.
        const auto f0 = node_residue_sum(data.with_parameter(name, 0.0), k);
        const auto f1 = node_residue_sum(data.with_parameter(name, 1.0), k);
        const Complex slope = f1.value - f0.value;
        if (std::abs(slope) <= tol * std::max({std::abs(f0.value), std::abs(f1.value), f1.scale})) continue;
        value = -f0.value / slope;
    }
    if (!value) throw NoConstraint("no node condition constrains parameter '" + name + "'");
    data.parameters[name] = *value;

    if (!data.parameters_bound()) return *value;
    const ValidationReport rep = check_residue_conditions(data);
    double worst = 0.0;
    std::string which;
    for (const auto& e : rep.entries) {
        if (e.rule != "Q-residues equal" && e.rule != "node residue condition") continue;
        if (std::isfinite(e.residual) && e.residual > worst) {
            worst = e.residual;
            which = e.rule;
        }
    }
    if (worst > tol)
        throw Inconsistent("parameter '" + name + "' = " + fmt(*value) + " violates " + which, *value, worst);
    return *value;
}

void solve_all_parameters(SpectralData& data) {
    for (const auto& name : data.unbound_parameters()) solve_scale_parameter(data, name);
}

}  // namespace bacoord
