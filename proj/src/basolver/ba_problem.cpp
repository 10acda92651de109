#include "bacoord/basolver/ba_problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Dense>

#include "bacoord/errors.hpp"
#include "bacoord/ratfun/tolerances.hpp"

namespace bacoord {

namespace {

constexpr double kMinRcond = 1e-10;

std::string format_u(const FlowPoint& u) {
    std::string out = "(";
    char buf[64];
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (u[k].imag() == 0.0) std::snprintf(buf, sizeof buf, "%s%.6g", k ? ", " : "", u[k].real());
        else std::snprintf(buf, sizeof buf, "%s%.6g%+.6gi", k ? ", " : "", u[k].real(), u[k].imag());
        out += buf;
    }
    return out + ")";
}

Complex product(const std::vector<Complex>& kappa, const DerivativeIndex& alpha) {
    Complex p = 1.0;
    for (int i : alpha) p *= kappa[static_cast<std::size_t>(i)];
    return p;
}

using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

Matrix to_matrix(const std::vector<Complex>& m, std::size_t n) {
    return Eigen::Map<const Matrix>(m.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

std::vector<Complex> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

BakerAkhiezerProblem::BakerAkhiezerProblem(SpectralData data) : data_(std::move(data)) {
    const double tol = tolerances().point;
    constant_unknown_.resize(data_.component_count());
    pole_unknown_.resize(data_.psi_poles.size());
    for (std::size_t c = 0; c < data_.component_count(); ++c) {
        constant_unknown_[c] = unknowns_.size();
        unknowns_.push_back({c, std::nullopt, data_.components[c] + ":1"});
        for (std::size_t k : data_.psi_poles_on(c)) {
            pole_unknown_[k] = unknowns_.size();
            unknowns_.push_back({c, k, data_.components[c] + ":1/(z-" + data_.psi_poles[k].location.to_string() + ")"});
        }
    }

    for (std::size_t k = 0; k < data_.nodes.size(); ++k) {
        const Node& n = data_.nodes[k];
        rows_.push_back({{{n.p.component, n.p.location, 1.0}, {n.q.component, n.q.location, -n.lambda}},
                         0.0,
                         "node " + std::to_string(k + 1)});
    }
    for (std::size_t k = 0; k < data_.normalization.size(); ++k) {
        const auto& r = data_.normalization[k];
        rows_.push_back({{{r.point.component, r.point.location, 1.0}}, r.value, "R" + std::to_string(k + 1)});
    }

    for (const Row& row : rows_)
        for (const Term& t : row.terms)
            for (const auto& e : data_.essential_points)
                if (same_point(e.point, {t.component, t.z}, tol))
                    throw EssentialAtConstraint(row.label + " sits on the essential point P" +
                                                std::to_string(e.flow_index));

    if (rows_.size() != unknowns_.size())
        throw InvariantError("square-system count", std::to_string(unknowns_.size()) + " unknowns vs " +
                                                        std::to_string(rows_.size()) + " conditions");
}

BakerAkhiezerProblem::PointData BakerAkhiezerProblem::point_data(const FlowPoint& u, const CurvePoint& z,
                                                                 int exclude_flow) const {
    const double tol = tolerances().point;
    PointData pd{0.0, std::vector<Complex>(static_cast<std::size_t>(dimension()), 0.0)};
    for (const auto& e : data_.essential_points) {
        if (e.point.component != z.component || e.flow_index - 1 == exclude_flow) continue;
        if (approx_equal(e.point.location, z.location, tol))
            throw EssentialPointError("ψ has an essential singularity at P" + std::to_string(e.flow_index) +
                                      "; use the leading coefficient h instead");
        const Complex k = e.local_coordinate(z.location);
        const auto j = static_cast<std::size_t>(e.flow_index - 1);
        pd.kappa[j] = k;
        pd.log_e += u[j] * k;
    }
    return pd;
}

Complex BakerAkhiezerProblem::rational_part(const std::vector<Complex>& c, const CurvePoint& z) const {
    Complex r = c[constant_unknown_[z.component]];
    if (z.location.is_infinite()) return r;
    const double tol = tolerances().point;
    for (std::size_t k : data_.psi_poles_on(z.component)) {
        const Complex d = z.location.value() - data_.psi_poles[k].location.value();
        if (std::abs(d) <= tol * (1.0 + std::abs(z.location.value())))
            throw PoleEvaluation("ψ has a pole at " + data_.describe(z));
        r += c[pole_unknown_[k]] / d;
    }
    return r;
}

std::vector<Complex> BakerAkhiezerProblem::matrix(const FlowPoint& u, const DerivativeIndex& alpha) const {
    const std::size_t n = unknowns_.size();
    std::vector<Complex> m(n * n, 0.0);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        for (const Term& t : rows_[r].terms) {
            const CurvePoint z{t.component, t.z};
            const PointData pd = point_data(u, z, -1);
            const Complex w = t.factor * std::exp(pd.log_e) * product(pd.kappa, alpha);
            if (w == Complex{}) continue;
            m[r * n + constant_unknown_[t.component]] += w;
            if (t.z.is_infinite()) continue;
            for (std::size_t k : data_.psi_poles_on(t.component))
                m[r * n + pole_unknown_[k]] += w / (t.z.value() - data_.psi_poles[k].location.value());
        }
    }
    return m;
}

LinearSystem BakerAkhiezerProblem::assemble(const FlowPoint& u) const {
    if (static_cast<int>(u.size()) != dimension())
        throw std::invalid_argument("flow point has " + std::to_string(u.size()) + " entries, expected " +
                                    std::to_string(dimension()));
    LinearSystem sys;
    sys.size = unknowns_.size();
    sys.matrix = matrix(u, {});
    for (const Row& row : rows_) {
        sys.rhs.push_back(row.rhs);
        sys.row_labels.push_back(row.label);
    }
    return sys;
}

BASolution BakerAkhiezerProblem::solve(const FlowPoint& u, int derivative_order) const {
    const LinearSystem sys = assemble(u);
    const std::size_t n = sys.size;
    const int nf = dimension();
    const Matrix m = to_matrix(sys.matrix, n);
    const Vector rhs = Eigen::Map<const Vector>(sys.rhs.data(), static_cast<Eigen::Index>(n));

    Vector row_scale(static_cast<Eigen::Index>(n));
    for (Eigen::Index r = 0; r < row_scale.size(); ++r) {
        const double big = m.row(r).cwiseAbs().maxCoeff();
        row_scale[r] = big > 0.0 ? 1.0 / big : 0.0;
    }
    const Matrix a = row_scale.asDiagonal() * m;
    const Eigen::PartialPivLU<Matrix> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond >= kMinRcond) || (row_scale.array() == Complex{}).any()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " (rcond %.3e)", rcond);
        throw SingularSystem("Baker-Akhiezer system is singular at u = " + format_u(u) + buf, rcond);
    }
    const auto solve_scaled = [&](const Vector& b) -> Vector { return lu.solve(row_scale.asDiagonal() * b); };

    BASolution s;
    s.u = u;
    s.rcond = rcond;
    const Vector c = solve_scaled(rhs);
    s.c = to_std(c);
    s.residual = (m * c - rhs).cwiseAbs().maxCoeff() / (1.0 + c.cwiseAbs().maxCoeff());

    if (derivative_order >= 1) {
        std::vector<Matrix> dm;
        std::vector<Vector> dc;
        for (int i = 0; i < nf; ++i) {
            dm.push_back(to_matrix(matrix(u, {i}), n));
            dc.push_back(solve_scaled(-(dm.back() * c)));
            s.first.push_back(to_std(dc.back()));
        }
        if (derivative_order >= 2) {
            s.second.assign(static_cast<std::size_t>(nf * nf), {});
            for (int i = 0; i < nf; ++i) {
                for (int j = i; j < nf; ++j) {
                    const Matrix dij = to_matrix(matrix(u, {i, j}), n);
                    const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
                    const Vector b = -(dij * c) - dm[ui] * dc[uj] - dm[uj] * dc[ui];
                    s.second[ui * static_cast<std::size_t>(nf) + uj] = to_std(solve_scaled(b));
                    s.second[uj * static_cast<std::size_t>(nf) + ui] = s.second[ui * static_cast<std::size_t>(nf) + uj];
                }
            }
        }
    }
    return s;
}

Complex BakerAkhiezerProblem::jet(const BASolution& s, const CurvePoint& z, const DerivativeIndex& alpha,
                                  int exclude_flow) const {
    if (static_cast<int>(alpha.size()) > s.derivative_order())
        throw std::invalid_argument("solution lacks derivatives of order " + std::to_string(alpha.size()));
    const PointData pd = point_data(s.u, z, exclude_flow);
    const Complex e = std::exp(pd.log_e);
    const auto nf = static_cast<std::size_t>(dimension());
    switch (alpha.size()) {
        case 0:
            return e * rational_part(s.c, z);
        case 1: {
            const auto i = static_cast<std::size_t>(alpha[0]);
            return e * (pd.kappa[i] * rational_part(s.c, z) + rational_part(s.first[i], z));
        }
        case 2: {
            const auto i = static_cast<std::size_t>(alpha[0]);
            const auto j = static_cast<std::size_t>(alpha[1]);
            return e * (pd.kappa[i] * pd.kappa[j] * rational_part(s.c, z) + pd.kappa[i] * rational_part(s.first[j], z) +
                        pd.kappa[j] * rational_part(s.first[i], z) + rational_part(s.second[i * nf + j], z));
        }
        default:
            throw std::invalid_argument("derivatives of order above 2 are not supported");
    }
}

Complex BakerAkhiezerProblem::psi(const BASolution& s, const CurvePoint& q) const { return jet(s, q, {}, -1); }

Complex BakerAkhiezerProblem::psi_derivative(const BASolution& s, const CurvePoint& q,
                                             const DerivativeIndex& alpha) const {
    return jet(s, q, alpha, -1);
}

Complex BakerAkhiezerProblem::h(const BASolution& s, int j) const { return jet(s, flow(j).point, {}, j); }

Complex BakerAkhiezerProblem::h_derivative(const BASolution& s, int j, int i) const {
    return jet(s, flow(j).point, {i}, j);
}

Complex BakerAkhiezerProblem::exponential(const FlowPoint& u, const CurvePoint& z) const {
    return std::exp(point_data(u, z, -1).log_e);
}

RationalFunction BakerAkhiezerProblem::derivative_factor(const BASolution& s, std::size_t component, int i) const {
    if (s.derivative_order() < 1) throw std::invalid_argument("solution lacks first derivatives");
    const auto rational = [&](const std::vector<Complex>& c) {
        RationalFunction r = RationalFunction::constant(c[constant_unknown_[component]]);
        for (std::size_t k : data_.psi_poles_on(component)) {
            const Complex a = c[pole_unknown_[k]];
            if (a != Complex{}) r = r + RationalFunction::simple_pole(data_.psi_poles[k].location.value()).scaled(a);
        }
        return r;
    };
    RationalFunction rho = rational(s.first[static_cast<std::size_t>(i)]);
    const EssentialPoint& e = flow(i);
    if (e.point.component == component) {
        const RationalFunction kappa = e.point.location.is_infinite()
                                           ? RationalFunction::polynomial(Polynomial({0.0, 1.0}))
                                           : RationalFunction::simple_pole(e.point.location.value());
        rho = rho + kappa * rational(s.c);
    }
    return rho;
}

double finite_difference_step(const FlowPoint& u) {
    double big = 1.0;
    for (Complex x : u) big = std::max(big, std::abs(x));
    return 1e-5 * big;
}

Complex psi_partial(const BakerAkhiezerProblem& problem, const FlowPoint& u, const CurvePoint& q,
                    const DerivativeIndex& alpha, DerivativeMode mode) {
    if (mode == DerivativeMode::Analytic)
        return problem.psi_derivative(problem.solve(u, static_cast<int>(alpha.size())), q, alpha);

    const double h = finite_difference_step(u);
    const auto at = [&](std::initializer_list<std::pair<int, double>> shifts) {
        FlowPoint v = u;
        for (const auto& [i, step] : shifts) v[static_cast<std::size_t>(i)] += step;
        return problem.psi(problem.solve(v), q);
    };
    switch (alpha.size()) {
        case 0:
            return at({});
        case 1: {
            const int i = alpha[0];
            return (at({{i, h}}) - at({{i, -h}})) / (2.0 * h);
        }
        case 2: {
            const int i = alpha[0], j = alpha[1];
            if (i == j) return (at({{i, h}}) - 2.0 * at({}) + at({{i, -h}})) / (h * h);
            return (at({{i, h}, {j, h}}) - at({{i, h}, {j, -h}}) - at({{i, -h}, {j, h}}) + at({{i, -h}, {j, -h}})) /
                   (4.0 * h * h);
        }
        default:
            throw std::invalid_argument("derivatives of order above 2 are not supported");
    }
}

OmegaIJ omega_ij_form(const BakerAkhiezerProblem& problem, const BASolution& s, int i, int j) {
    const SpectralData& data = problem.data();
    if (!data.sigma) throw InvolutionMismatch("ω_ij needs the involution σ");
    const Involution& sigma = *data.sigma;
    const double tol = tolerances().point;
    static const Complex probes[] = {{0.4127, 0.3301}, {-1.1093, 0.5717}, {1.7391, -0.8123}};

    OmegaIJ out{i, j, {}};
    for (std::size_t k = 0; k < data.component_count(); ++k) {
        const std::size_t sk = sigma.component_map[k];
        const MobiusMap& m = sigma.maps[k];
        for (std::size_t e : data.essential_points_on(k)) {
            const EssentialPoint& p = data.essential_points[e];
            bool ok = sk == k;
            for (Complex z : probes) {
                if (!ok) break;
                const Complex a = p.local_coordinate(z);
                ok = std::abs(a + p.local_coordinate(m(z))) <= tol * (1.0 + std::abs(a));
            }
            if (!ok)
                throw InvolutionMismatch("exponential factors do not cancel under σ at P" + std::to_string(p.flow_index));
        }
        if (sk != k && !data.essential_points_on(sk).empty())
            throw InvolutionMismatch("σ moves an essential point off its component");

        const RationalFunction left = problem.derivative_factor(s, k, i);
        const RationalFunction right = compose(problem.derivative_factor(s, sk, j), m);
        out.forms.push_back({left * right * data.omega_form(k).coefficient});
    }
    return out;
}

}  // namespace bacoord
