#include <algorithm>
#include <cmath>

#include "bacoord/curve/validation.hpp"
#include "bacoord/errors.hpp"
#include "bacoord/ratfun/tolerances.hpp"
#include "bacoord/verify/verify.hpp"

namespace bacoord {

namespace {

bool is_real(const FlowPoint& u) {
    return std::all_of(u.begin(), u.end(), [](Complex v) { return v.imag() == 0.0; });
}

double ratio(double num, double den) { return num == 0.0 ? 0.0 : num / std::max(den, 1e-300); }

}  // namespace

CoordinateSample coordinates(const BakerAkhiezerProblem& problem, const FlowPoint& u) {
    const SpectralData& d = problem.data();
    const auto n = static_cast<std::size_t>(d.dimension);
    CoordinateSample out;
    out.u = u;
    BASolution s;
    try {
        s = problem.solve(u, 1);
    } catch (const SingularSystem& e) {
        out.gap_reason = e.what();
        return out;
    }
    out.solved = true;
    out.jacobian.assign(n, std::vector<Complex>(n));
    out.H2.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const CurvePoint q = d.q_point(static_cast<int>(k) + 1).point;
        out.x.push_back(problem.psi(s, q));
        for (std::size_t i = 0; i < n; ++i) out.jacobian[i][k] = problem.psi_derivative(s, q, {static_cast<int>(i)});
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) out.H2[i] += out.jacobian[i][k] * out.jacobian[i][k];
    return out;
}

double orthogonality_residual(const CoordinateSample& sample) {
    if (!sample.solved) throw std::invalid_argument("orthogonality residual of an unsolved sample");
    const std::size_t n = sample.H2.size();
    double scale = 0.0, worst = 0.0;
    for (Complex h : sample.H2) scale = std::max(scale, std::abs(h));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            Complex g{};
            for (std::size_t k = 0; k < n; ++k) g += sample.jacobian[i][k] * sample.jacobian[j][k];
            worst = std::max(worst, std::abs(g));
        }
    return ratio(worst, scale);
}

CurvePoint random_curve_point(const SpectralData& data, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, data.component_count() - 1);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    const auto near = [](const CurvePoint& a, const CurvePoint& b) {
        return a.component == b.component && b.location.is_finite() &&
               std::abs(a.location.value() - b.location.value()) < 0.05;
    };
    for (;;) {
        const CurvePoint x{pick(rng), SpherePoint(Complex{coord(rng), coord(rng)})};
        bool clear = true;
        for (const auto& g : data.psi_poles) clear = clear && !near(x, g);
        for (const auto& e : data.essential_points) clear = clear && !near(x, e.point);
        for (const auto& nd : data.nodes) clear = clear && !near(x, nd.p) && !near(x, nd.q);
        if (clear) return x;
    }
}

RealityResidual reality_residual(const BakerAkhiezerProblem& problem, const FlowPoint& u, std::uint64_t seed,
                                 int probes) {
    const SpectralData& d = problem.data();
    if (!d.tau) throw NoTau("reality needs the antiholomorphic involution τ");
    RealityResidual out;
    if (!is_real(u)) {
        out.reason = "u is not real";
        return out;
    }
    out.applicable = true;
    const BASolution s = problem.solve(u);
    double xmax = 0.0, imax = 0.0;
    for (const auto& q : d.q_points) {
        const Complex x = problem.psi(s, q.point);
        xmax = std::max(xmax, std::abs(x));
        imax = std::max(imax, std::abs(x.imag()));
    }
    out.imaginary = imax / (1.0 + xmax);

    std::mt19937_64 rng(seed);
    for (int k = 0; k < probes; ++k) {
        const CurvePoint p = random_curve_point(d, rng);
        const Complex a = problem.psi(s, p);
        const Complex b = problem.psi(s, (*d.tau)(p));
        out.probe = std::max(out.probe, std::abs(a - std::conj(b)) / (1.0 + std::abs(a)));
    }
    return out;
}

std::optional<std::string> egorov_shape_violation(const SpectralData& d) {
    const double tol = tolerances().point;
    if (static_cast<int>(d.component_count()) != d.dimension) return "component count differs from the dimension";
    std::vector<bool> used(d.component_count(), false);
    for (int j = 1; j <= d.dimension; ++j) {
        const EssentialPoint& p = d.essential(j);
        const QPoint& q = d.q_point(j);
        if (!p.point.location.is_infinite()) return "P" + std::to_string(j) + " is not at infinity";
        if (q.point.component != p.point.component) return "Q" + std::to_string(j) + " is not on the component of P" + std::to_string(j);
        if (!approx_equal(q.point.location, SpherePoint(0.0), tol)) return "Q" + std::to_string(j) + " is not at 0";
        if (used[p.point.component]) return "two essential points share " + d.components[p.point.component];
        used[p.point.component] = true;
    }
    for (std::size_t k = 0; k < d.nodes.size(); ++k)
        if (!approx_equal(d.nodes[k].p.location, d.nodes[k].q.location, tol))
            return "node " + std::to_string(k + 1) + " glues different coordinates";
    return std::nullopt;
}

EgorovData egorov_checks(const BakerAkhiezerProblem& problem, const FlowPoint& u) {
    const SpectralData& d = problem.data();
    if (auto why = egorov_shape_violation(d)) throw NotEgorovShape(*why);
    const int n = d.dimension;
    const auto un = static_cast<std::size_t>(n);

    const BASolution s = problem.solve(u, 1);
    const CoordinateSample sample = coordinates(problem, u);

    EgorovData out;
    out.rho = q_residue(d);
    out.H2 = sample.H2;
    std::vector<Complex> e(un);
    double lame_num = 0.0, lame_den = 0.0;
    for (int j = 0; j < n; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        const EssentialPoint& p = d.essential(j + 1);
        out.epsilon2.push_back(epsilon_squared(d.omega_form(p.point.component), p.point.location, LocalParameter::Affine));
        out.h.push_back(problem.h(s, j));
        if (out.h.back() == Complex{}) throw ZeroLame("h" + std::to_string(j + 1) + " vanishes");
        e[uj] = std::sqrt(out.epsilon2[uj] / out.rho);
        const Complex predicted = out.epsilon2[uj] * out.h[uj] * out.h[uj] / out.rho;
        lame_num = std::max(lame_num, std::abs(out.H2[uj] - predicted));
        lame_den = std::max({lame_den, std::abs(out.H2[uj]), std::abs(predicted)});
    }
    out.lame_residual = ratio(lame_num, lame_den);

    out.beta.assign(un * un, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
            out.beta[ui * un + uj] = e[uj] * problem.h_derivative(s, j, i) / (e[ui] * out.h[ui]);
        }
    for (std::size_t i = 0; i < un; ++i)
        for (std::size_t j = i + 1; j < un; ++j) {
            const Complex a = out.beta[i * un + j], b = out.beta[j * un + i];
            out.beta_residual = std::max(out.beta_residual, ratio(std::abs(a - b), std::max(std::abs(a), std::abs(b))));
        }
    return out;
}

EpdResidual epd_residual(const BakerAkhiezerProblem& problem, const BASolution& s, int i, int j, const CurvePoint& q) {
    if (i == j) throw std::invalid_argument("the second-order equation needs i != j");
    const Complex hi = problem.h(s, i), hj = problem.h(s, j);
    if (hi == Complex{} || hj == Complex{}) throw ZeroLame("a leading coefficient h vanishes");
    const Complex t0 = problem.psi_derivative(s, q, {i, j});
    const Complex t1 = problem.h_derivative(s, i, j) / hi * problem.psi_derivative(s, q, {i});
    const Complex t2 = problem.h_derivative(s, j, i) / hj * problem.psi_derivative(s, q, {j});
    EpdResidual out;
    out.value = t0 - t1 - t2;
    out.normalized = ratio(std::abs(out.value), std::max({std::abs(t0), std::abs(t1), std::abs(t2)}));
    return out;
}

NodeCancellation node_cancellation_residual(const BakerAkhiezerProblem& problem, const BASolution& s, int i, int j) {
    const SpectralData& d = problem.data();
    const OmegaIJ w = omega_ij_form(problem, s, i, j);
    double scale = 0.0;
    for (const auto& f : w.forms) scale = std::max(scale, max_residue_magnitude(f));

    NodeCancellation out;
    for (const Node& nd : d.nodes) {
        const Complex sum = residue_or_zero(w.forms[nd.p.component], nd.p.location) +
                            residue_or_zero(w.forms[nd.q.component], nd.q.location);
        out.node = std::max(out.node, ratio(std::abs(sum), scale));
    }
    for (const auto& f : w.forms) out.global = std::max(out.global, ratio(std::abs(residue_sum(f)), scale));

    const Complex rho = q_residue(d);
    Complex lhs{}, rhs{};
    for (const auto& q : d.q_points) {
        lhs += residue_or_zero(w.forms[q.point.component], q.point.location);
        rhs += problem.psi_derivative(s, q.point, {i}) * problem.psi_derivative(s, q.point, {j});
    }
    out.q_identity = ratio(std::abs(lhs - rho * rhs), scale);
    return out;
}

}  // namespace bacoord
