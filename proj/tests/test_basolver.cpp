#include "doctest.h"

#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "bacoord/basolver/ba_problem.hpp"
#include "bacoord/curve/io.hpp"
#include "bacoord/errors.hpp"
#include "json.hpp"
#include "support/expression.hpp"

using namespace bacoord;
using Json = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kAll = {"example1", "example1_lambda12", "example2", "example3", "minimal1d"};

std::string dataset(const std::string& name) { return std::string(BACOORD_DATASET_DIR) + "/" + name; }

SpectralData load(const std::string& name) { return load_spectral_data(dataset(name + ".bacurve")); }

SpectralData mutated(const std::string& name, const std::function<void(Json&)>& edit) {
    std::ifstream in(dataset(name + ".bacurve"));
    Json j = Json::parse(in);
    edit(j);
    return parse_spectral_data(j.dump());
}

bool close(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); }

CurvePoint on(const SpectralData& d, const std::string& component, SpherePoint z) {
    return {*d.find_component(component), z};
}

FlowPoint random_u(std::mt19937_64& rng, int n, double radius = 1.0) {
    std::uniform_real_distribution<double> dist(-radius, radius);
    FlowPoint u;
    for (int k = 0; k < n; ++k) u.emplace_back(dist(rng));
    return u;
}

/// A point of the curve away from ψ poles and essential points.
CurvePoint random_point(const SpectralData& d, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, d.component_count() - 1);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (;;) {
        const CurvePoint x{pick(rng), SpherePoint(Complex{dist(rng), dist(rng)})};
        bool clear = true;
        for (const auto& g : d.psi_poles)
            clear = clear && !(g.component == x.component && std::abs(g.location.value() - x.location.value()) < 0.05);
        for (const auto& e : d.essential_points)
            clear = clear && !(e.point.component == x.component && e.point.location.is_finite() &&
                               std::abs(e.point.location.value() - x.location.value()) < 0.05);
        if (clear) return x;
    }
}

Complex direct_residue(const std::function<Complex(Complex)>& f, Complex p, double radius = 1e-3) {
    constexpr int n = 256;
    Complex sum{};
    for (int k = 0; k < n; ++k) {
        const Complex e = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
        sum += f(p + radius * e) * radius * e;
    }
    return sum / static_cast<double>(n);
}

}  // namespace

TEST_CASE("system size matches unknown count on every dataset") {
    CHECK(BakerAkhiezerProblem(load("example1")).assemble({0.0, 0.0}).size == 3);
    CHECK(BakerAkhiezerProblem(load("example2")).assemble({0.0, 0.0}).size == 4);
    CHECK(BakerAkhiezerProblem(load("example3")).assemble({0.0, 0.0}).size == 3);
    const BakerAkhiezerProblem minimal(load("minimal1d"));
    CHECK(minimal.assemble({0.0}).size == 1);
    CHECK_THROWS_AS(minimal.assemble({0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("example 1 coefficients at the origin and along u1") {
    const BakerAkhiezerProblem p(load("example1"));
    const BASolution s0 = p.solve({0.0, 0.0});
    REQUIRE(s0.c.size() == 3);
    // unknown order: G1 constant, G2 constant, G2 coefficient of 1/(z - 1)
    CHECK(close(s0.c[0], 1.0, 1e-13));
    CHECK(close(s0.c[1], 1.0, 1e-13));
    CHECK(std::abs(s0.c[2]) < 1e-13);
    CHECK(s0.residual < 1e-14);
    CHECK(s0.rcond > 1e-3);

    const BASolution s1 = p.solve({1.0, 0.0});
    CHECK(close(s1.c[0], std::exp(-1.0), 1e-13));
}

TEST_CASE("the single-component system solves to d times exp(-u r)") {
    const BakerAkhiezerProblem p(load("minimal1d"));
    for (double u : {-1.5, -0.2, 0.0, 0.7, 2.0}) {
        const BASolution s = p.solve({u});
        CHECK(close(s.c[0], std::exp(-u), 1e-14));
    }
}

TEST_CASE("duplicate node rows make the system singular") {
    const SpectralData d = mutated("example1", [](Json& j) { j["nodes"][1] = j["nodes"][0]; });
    const BakerAkhiezerProblem p(d);
    try {
        (void)p.solve({0.25, -0.5});
        FAIL("expected SingularSystem");
    } catch (const SingularSystem& e) {
        CHECK(std::string(e.what()).find("0.25") != std::string::npos);
    }
}

TEST_CASE("a constraint on an essential point is rejected at construction") {
    const SpectralData d = mutated("example1", [](Json& j) { j["normalization"][0]["location"] = 0; });
    CHECK_THROWS_AS(BakerAkhiezerProblem{d}, EssentialAtConstraint);
}

TEST_CASE("psi at the Q points of example 1") {
    {
        const SpectralData d = load("example1");
        const BakerAkhiezerProblem p(d);
        const BASolution s = p.solve({0.0, 0.0});
        CHECK(close(p.psi(s, d.q_point(1).point), 1.0, 1e-13));
        CHECK(close(p.psi(s, d.q_point(2).point), 1.0, 1e-13));
    }
    {
        const SpectralData d = load("example1_lambda12");
        const BakerAkhiezerProblem p(d);
        const BASolution s = p.solve({0.0, 0.0});
        CHECK(close(p.psi(s, d.q_point(1).point), -0.2, 1e-13));
        CHECK(close(p.psi(s, d.q_point(2).point), 0.6, 1e-13));
    }
}

TEST_CASE("psi refuses poles and essential points") {
    const SpectralData d = load("example1");
    const BakerAkhiezerProblem p(d);
    const BASolution s = p.solve({0.1, 0.2});
    CHECK_THROWS_AS(p.psi(s, on(d, "G2", SpherePoint(1.0))), PoleEvaluation);
    CHECK_THROWS_AS(p.psi(s, on(d, "G1", SpherePoint::infinity())), EssentialPointError);
    CHECK_THROWS_AS(p.psi(s, on(d, "G1", SpherePoint(0.0))), EssentialPointError);
    CHECK_NOTHROW(p.psi(s, on(d, "G2", SpherePoint::infinity())));
}

TEST_CASE("first derivatives of the example 1 coordinates at the origin") {
    const SpectralData d = load("example1");
    const BakerAkhiezerProblem p(d);
    const CurvePoint x = d.q_point(1).point, y = d.q_point(2).point;
    const FlowPoint u{0.0, 0.0};
    const Complex expected[4] = {0.0, -2.0, -2.0, 0.0};
    const Complex got[4] = {psi_partial(p, u, x, {0}), psi_partial(p, u, x, {1}), psi_partial(p, u, y, {0}),
                            psi_partial(p, u, y, {1})};
    for (int k = 0; k < 4; ++k) CHECK(close(got[k], expected[k], 1e-12));
    CHECK(psi_partial(p, u, x, {}) == p.psi(p.solve(u), x));
}

TEST_CASE("coordinates match the closed forms") {
    std::mt19937_64 rng(20261019);
    for (const auto& name : kAll) {
        CAPTURE(name);
        const SpectralData d = load(name);
        const auto forms = oracle::ClosedForms::load(dataset(name + ".oracle"));
        const BakerAkhiezerProblem p(d);
        for (int trial = 0; trial < 25; ++trial) {
            const FlowPoint u = random_u(rng, d.dimension, 1.5);
            std::vector<double> ur;
            for (Complex v : u) ur.push_back(v.real());
            const BASolution s = p.solve(u);
            for (int k = 1; k <= d.dimension; ++k) {
                CAPTURE(k);
                CHECK(close(p.psi(s, d.q_point(k).point), forms.coordinate(static_cast<std::size_t>(k - 1), ur), 1e-11));
            }
        }
    }
}

TEST_CASE("analytic and finite-difference derivatives agree") {
    std::mt19937_64 rng(5);
    for (const auto& name : kAll) {
        CAPTURE(name);
        const SpectralData d = load(name);
        const BakerAkhiezerProblem p(d);
        double worst_first = 0.0, worst_second = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const FlowPoint u = random_u(rng, d.dimension);
            const CurvePoint q = random_point(d, rng);
            const BASolution s = p.solve(u, 2);
            const double scale = std::abs(p.psi(s, q));
            for (int i = 0; i < d.dimension; ++i) {
                const Complex a = p.psi_derivative(s, q, {i});
                const Complex f = psi_partial(p, u, q, {i}, DerivativeMode::FiniteDifference);
                worst_first = std::max(worst_first, std::abs(a - f) / std::max({std::abs(a), scale, 1e-300}));
                for (int j = 0; j < d.dimension; ++j) {
                    const Complex a2 = p.psi_derivative(s, q, {i, j});
                    const Complex f2 = psi_partial(p, u, q, {i, j}, DerivativeMode::FiniteDifference);
                    worst_second =
                        std::max(worst_second, std::abs(a2 - f2) / std::max({std::abs(a2), scale, 1e-300}));
                }
            }
        }
        CHECK(worst_first < 1e-7);
        CHECK(worst_second < 1e-4);
    }
}

TEST_CASE("finite-difference error shrinks like h squared") {
    const SpectralData d = load("example3");
    const BakerAkhiezerProblem p(d);
    const FlowPoint u{0.3, -0.4};
    const CurvePoint q = d.q_point(2).point;
    const Complex exact = p.psi_derivative(p.solve(u, 1), q, {0});
    const auto central = [&](double h) {
        FlowPoint a = u, b = u;
        a[0] += h;
        b[0] -= h;
        return (p.psi(p.solve(a), q) - p.psi(p.solve(b), q)) / (2.0 * h);
    };
    const double e1 = std::abs(central(1e-2) - exact), e2 = std::abs(central(5e-3) - exact);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
    CHECK(finite_difference_step({0.5, -3.0}) == doctest::Approx(3e-5));
    CHECK(finite_difference_step({0.5}) == doctest::Approx(1e-5));
}

TEST_CASE("leading coefficients h_j") {
    {
        const SpectralData d = load("example1");
        const BakerAkhiezerProblem p(d);
        const BASolution s = p.solve({0.4, -0.3}, 1);
        // f(u) is the G1 constant; both h_1 and h_2 reduce to it
        CHECK(close(p.h(s, 0), s.c[0], 1e-14));
        CHECK(close(p.h(s, 1), s.c[0], 1e-14));
        CHECK(close(p.h_derivative(s, 0, 1), s.first[1][0], 1e-14));
    }
    {
        const SpectralData d = load("example3");
        const BakerAkhiezerProblem p(d);
        const BASolution s = p.solve({0.0, 0.0});
        CHECK(close(p.h(s, 0), 4.0 / 3.0, 1e-13));
    }
}

TEST_CASE("h_j matches the limit of psi times exp(-u^j k_j)") {
    std::mt19937_64 rng(17);
    for (const auto& name : kAll) {
        CAPTURE(name);
        const SpectralData d = load(name);
        const BakerAkhiezerProblem p(d);
        for (int trial = 0; trial < 5; ++trial) {
            const FlowPoint u = random_u(rng, d.dimension);
            const BASolution s = p.solve(u);
            for (const auto& e : d.essential_points) {
                const int j = e.flow_index - 1;
                // approach P_j so that u^j k_j stays imaginary and the exponential stays bounded
                Complex last{};
                for (double t : {1e4, 1e5, 1e6, 1e7}) {
                    const SpherePoint z = e.point.location.is_infinite()
                                              ? SpherePoint(Complex{0.0, t})
                                              : SpherePoint(e.point.location.value() + Complex{0.0, 1.0 / t});
                    const CurvePoint x{e.point.component, z};
                    last = p.psi(s, x) * std::exp(-u[static_cast<std::size_t>(j)] * e.local_coordinate(z));
                }
                CHECK(close(p.h(s, j), last, 1e-6));
            }
        }
    }
}

TEST_CASE("h_j derivatives match central differences") {
    std::mt19937_64 rng(23);
    for (const auto& name : kAll) {
        CAPTURE(name);
        const BakerAkhiezerProblem p(load(name));
        const FlowPoint u = random_u(rng, p.dimension());
        const BASolution s = p.solve(u, 1);
        const double h = finite_difference_step(u);
        for (int j = 0; j < p.dimension(); ++j)
            for (int i = 0; i < p.dimension(); ++i) {
                FlowPoint a = u, b = u;
                a[static_cast<std::size_t>(i)] += h;
                b[static_cast<std::size_t>(i)] -= h;
                const Complex fd = (p.h(p.solve(a), j) - p.h(p.solve(b), j)) / (2.0 * h);
                CHECK(close(p.h_derivative(s, j, i), fd, 1e-7));
            }
    }
}

TEST_CASE("solved constraints re-evaluate to their right-hand sides") {
    std::mt19937_64 rng(29);
    for (const auto& name : kAll) {
        CAPTURE(name);
        const SpectralData d = load(name);
        const BakerAkhiezerProblem p(d);
        for (int trial = 0; trial < 10; ++trial) {
            const BASolution s = p.solve(random_u(rng, d.dimension, 2.0));
            double cmax = 0.0;
            for (Complex v : s.c) cmax = std::max(cmax, std::abs(v));
            for (const Node& n : d.nodes)
                CHECK(std::abs(p.psi(s, n.p) - n.lambda * p.psi(s, n.q)) <= 1e-9 * (1.0 + cmax));
            for (const auto& r : d.normalization) CHECK(std::abs(p.psi(s, r.point) - r.value) <= 1e-9 * (1.0 + cmax));
            CHECK(s.residual < 1e-12);
        }
    }
}

TEST_CASE("psi is linear in the normalization values") {
    const auto with_d = [](Complex d1, Complex d2) {
        return mutated("example2", [&](Json& j) {
            j["normalization"][0]["value"] = Json::array({d1.real(), d1.imag()});
            j["normalization"][1]["value"] = Json::array({d2.real(), d2.imag()});
        });
    };
    const Complex a{0.7, -0.2}, b{-1.3, 0.4};
    const BakerAkhiezerProblem pa(with_d(a, 0.0)), pb(with_d(0.0, b)), pab(with_d(a, b));
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const FlowPoint u = random_u(rng, 2);
        const CurvePoint q = random_point(pab.data(), rng);
        const Complex sum = pa.psi(pa.solve(u), q) + pb.psi(pb.solve(u), q);
        CHECK(close(pab.psi(pab.solve(u), q), sum, 1e-10));
    }
}

TEST_CASE("omega_ij equals the direct product of psi derivatives") {
    std::mt19937_64 rng(37);
    for (const auto& name : kAll) {
        CAPTURE(name);
        const SpectralData d = load(name);
        const BakerAkhiezerProblem p(d);
        const FlowPoint u = random_u(rng, d.dimension);
        const BASolution s = p.solve(u, 1);
        for (int i = 0; i < d.dimension; ++i)
            for (int j = 0; j < d.dimension; ++j) {
                const OmegaIJ w = omega_ij_form(p, s, i, j);
                REQUIRE(w.forms.size() == d.component_count());
                for (int sample = 0; sample < 20; ++sample) {
                    const CurvePoint z = random_point(d, rng);
                    const CurvePoint sz = (*d.sigma)(z);
                    const Complex direct = p.psi_derivative(s, z, {i}) * p.psi_derivative(s, sz, {j}) *
                                           evaluate(d.omega_form(z.component).coefficient, z.location);
                    CHECK(close(evaluate(w.forms[z.component].coefficient, z.location), direct, 1e-8));
                }
            }
    }
}

TEST_CASE("omega_11 on example 1 has total residue zero") {
    const SpectralData d = load("example1");
    const BakerAkhiezerProblem p(d);
    const OmegaIJ w = omega_ij_form(p, p.solve({0.0, 0.0}, 1), 0, 0);
    Complex total{};
    double scale = 0.0;
    for (const auto& f : w.forms) {
        total += residue_sum(f);
        scale = std::max(scale, max_residue_magnitude(f));
    }
    CHECK(std::abs(total) <= 1e-12 * scale);

    // the node residues against an independent contour integral
    for (const Node& n : d.nodes) {
        const auto& f = w.forms[n.p.component].coefficient;
        const Complex direct =
            direct_residue([&](Complex z) { return evaluate(f, SpherePoint(z)); }, n.p.location.value());
        CHECK(close(residue_or_zero(w.forms[n.p.component], n.p.location), direct, 1e-9));
    }
}

TEST_CASE("node residues of omega_ij cancel pairwise") {
    std::mt19937_64 rng(41);
    for (const auto& name : kAll) {
        CAPTURE(name);
        const SpectralData d = load(name);
        const BakerAkhiezerProblem p(d);
        for (int trial = 0; trial < 5; ++trial) {
            const BASolution s = p.solve(random_u(rng, d.dimension), 1);
            for (int i = 0; i < d.dimension; ++i)
                for (int j = 0; j < d.dimension; ++j) {
                    const OmegaIJ w = omega_ij_form(p, s, i, j);
                    double scale = 0.0;
                    for (const auto& f : w.forms) scale = std::max(scale, max_residue_magnitude(f));
                    for (const Node& n : d.nodes) {
                        const Complex sum = residue_or_zero(w.forms[n.p.component], n.p.location) +
                                            residue_or_zero(w.forms[n.q.component], n.q.location);
                        CHECK(std::abs(sum) <= 1e-10 * std::max(scale, 1e-300));
                    }
                }
        }
    }
}

TEST_CASE("Q residues of omega_ij factor through the coordinate derivatives") {
    std::mt19937_64 rng(43);
    for (const auto& name : kAll) {
        CAPTURE(name);
        const SpectralData d = load(name);
        const BakerAkhiezerProblem p(d);
        const FlowPoint u = random_u(rng, d.dimension);
        const BASolution s = p.solve(u, 1);
        for (int i = 0; i < d.dimension; ++i)
            for (int j = 0; j < d.dimension; ++j) {
                const OmegaIJ w = omega_ij_form(p, s, i, j);
                for (const auto& q : d.q_points) {
                    const Complex rho = residue(d.omega_form(q.point.component), q.point.location);
                    const Complex expected = rho * p.psi_derivative(s, q.point, {i}) * p.psi_derivative(s, q.point, {j});
                    CHECK(close(residue_or_zero(w.forms[q.point.component], q.point.location), expected, 1e-10));
                }
            }
    }
}

TEST_CASE("omega_ij is regular at the normalization points of example 2") {
    const SpectralData d = load("example2");
    const BakerAkhiezerProblem p(d);
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 5; ++trial) {
        const BASolution s = p.solve(random_u(rng, 2), 1);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const OmegaIJ w = omega_ij_form(p, s, i, j);
                double scale = 0.0;
                for (const auto& f : w.forms) scale = std::max(scale, max_residue_magnitude(f));
                for (const auto& r : d.normalization)
                    CHECK(std::abs(residue_or_zero(w.forms[r.point.component], r.point.location)) <= 1e-8 * scale);
            }
    }
}

TEST_CASE("omega_ij needs an involution that cancels the exponentials") {
    const SpectralData bad = mutated("example1", [](Json& j) { j["sigma"]["mobius"]["G1"] = {{1, 0}, {0, 1}}; });
    const BakerAkhiezerProblem p(bad);
    CHECK_THROWS_AS(omega_ij_form(p, p.solve({0.0, 0.0}, 1), 0, 1), InvolutionMismatch);

    SpectralData none = load("example1");
    none.sigma.reset();
    const BakerAkhiezerProblem q(none);
    CHECK_THROWS_AS(omega_ij_form(q, q.solve({0.0, 0.0}, 1), 0, 1), InvolutionMismatch);
}
