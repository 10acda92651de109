#include "doctest.h"

#include <random>

#include "bacoord/errors.hpp"
#include "bacoord/ratfun/mobius.hpp"
#include "bacoord/ratfun/rational_function.hpp"
#include "bacoord/ratfun/tolerances.hpp"
#include "support/oracles.hpp"

using namespace bacoord;

namespace {

const Complex I{0.0, 1.0};

bool close(Complex a, Complex b, double tol = 1e-12) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); }

RationalOneForm form(Polynomial num, std::vector<Pole> poles, Complex scale = 1.0) {
    return {RationalFunction(std::move(num), std::move(poles), scale)};
}

// (z² - γ²) dz / (z (z² - b²)), the second component form of the first worked example.
RationalOneForm omega2(Complex gamma, Complex b) {
    return form(Polynomial({-gamma * gamma, 0.0, 1.0}), {{0.0, 1}, {b, 1}, {-b, 1}});
}

RationalOneForm from_raw(const oracle::RawForm& w) {
    std::vector<Pole> poles;
    for (const auto& p : w.poles) poles.push_back({p.location, p.order});
    return form(Polynomial(w.numerator), poles, w.scale);
}

}  // namespace

TEST_CASE("polynomial division and Taylor shift") {
    const Polynomial p({1.0, -3.0, 0.0, 2.0});  // 2z³ - 3z + 1
    const auto [q, r] = p.divmod(Polynomial({-1.0, 1.0}));
    CHECK(q.degree() == 2);
    CHECK(r.is_zero());  // z = 1 is a root
    const auto t = p.taylor(2.0, 4);
    // p(2 + t) = 11 + 21 t + 12 t² + 2 t³
    CHECK(close(t[0], 11.0));
    CHECK(close(t[1], 21.0));
    CHECK(close(t[2], 12.0));
    CHECK(close(t[3], 2.0));
    const auto [d, rem] = p.deflate(1.0);
    CHECK(close(rem, 0.0));
    CHECK(close(d(3.0), p(3.0) / 2.0));
}

TEST_CASE("evaluate: direct substitution and the degree rule") {
    CHECK(close(evaluate(RationalFunction::simple_pole(0.0), Complex{2.0}), 0.5));

    const RationalFunction f(Polynomial({-1.0, 0.0, 1.0}), {{0.0, 1}, {I, 1}, {-I, 1}});
    CHECK(close(evaluate(f, SpherePoint::infinity()), 0.0));

    CHECK(std::abs(evaluate(omega2(1.0, I).coefficient, Complex{1.0})) < 1e-15);

    const RationalFunction g(Polynomial({0.0, 0.0, 3.0}), {{1.0, 2}}, 2.0);
    CHECK(close(evaluate(g, SpherePoint::infinity()), 6.0));
}

TEST_CASE("evaluate: errors") {
    CHECK_THROWS_AS(evaluate(RationalFunction::simple_pole(1.0), Complex{1.0}), PoleEvaluation);
    const auto poly = RationalFunction::polynomial(Polynomial({0.0, 1.0}));
    CHECK_THROWS_AS(evaluate(poly, SpherePoint::infinity()), InfiniteValue);
}

TEST_CASE("construction rejects violated invariants") {
    CHECK_THROWS_AS(RationalFunction(Polynomial({1.0}), {{1.0, 1}, {1.0 + 1e-12, 1}}), InvariantError);
    CHECK_THROWS_AS(RationalFunction(Polynomial({-1.0, 1.0}), {{1.0, 1}}), InvariantError);
    CHECK_THROWS_AS(RationalFunction(Polynomial({1.0}), {{1.0, 0}}), InvariantError);
}

TEST_CASE("reduced construction cancels numerator roots on poles") {
    // (z - 1)(z + 2) / ((z - 1)^2 z)  ->  (z + 2) / ((z - 1) z)
    const auto f = RationalFunction::reduced(Polynomial({-2.0, 1.0, 1.0}), {{1.0, 2}, {0.0, 1}});
    CHECK(f.numerator_degree() == 1);
    CHECK(f.pole_order_at(1.0, 1e-9).value() == 1);
    CHECK(close(evaluate(f, Complex{3.0}), 5.0 / 6.0));
}

TEST_CASE("residue: defining cases") {
    CHECK(close(residue(form(Polynomial({1.0}), {{0.0, 1}}), Complex{0.0}), 1.0));
    CHECK(close(residue(form(Polynomial({1.0}), {{1.0, 2}}), Complex{1.0}), 0.0));
    CHECK(close(residue(form(Polynomial({1.0}), {{0.0, 1}}), SpherePoint::infinity()), -1.0));
}

TEST_CASE("residue: second component form of the first example by partial fractions") {
    const auto w = omega2(1.0, I);
    // Res_0 = γ²/b² = -1, Res_{±b} = (b² - γ²)/(2b²) = 1, Res_∞ = -1
    CHECK(close(residue(w, Complex{0.0}), -1.0));
    CHECK(close(residue(w, I), 1.0));
    CHECK(close(residue(w, -I), 1.0));
    CHECK(close(residue(w, SpherePoint::infinity()), -1.0));
    CHECK(std::abs(residue_sum(w)) < 1e-14);
    CHECK_THROWS_AS(residue(w, Complex{5.0}), NotAPole);
    CHECK(residue_or_zero(w, Complex{5.0}) == Complex{});
}

TEST_CASE("residue: higher-order poles") {
    // z² / (z - 1)^3 = 1/(z-1) + 2/(z-1)^2 + 1/(z-1)^3 + ... : residue 1 at z = 1
    CHECK(close(residue(form(Polynomial({0.0, 0.0, 1.0}), {{1.0, 3}}), Complex{1.0}), 1.0));
    // 1 / (z^2 (z - 2)): Res_0 = -1/4, Res_2 = 1/4
    const auto w = form(Polynomial({1.0}), {{0.0, 2}, {2.0, 1}});
    CHECK(close(residue(w, Complex{0.0}), -0.25));
    CHECK(close(residue(w, Complex{2.0}), 0.25));
    CHECK(std::abs(residue(w, SpherePoint::infinity())) < 1e-15);
}

TEST_CASE("residue theorem and contour oracle on random forms") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const auto raw = oracle::random_form(rng);
        const auto w = from_raw(raw);
        CHECK(std::abs(residue_sum(w)) <= 1e-10 * (1.0 + max_residue_magnitude(w)));
        for (std::size_t k = 0; k < raw.poles.size(); ++k) {
            const auto ref = oracle::residue_by_contour(raw, k);
            const Complex got = residue(w, raw.poles[k].location);
            CHECK(std::abs(got - ref.value) <= 1e-8 * ref.magnitude);
        }
        const auto ref_inf = oracle::residue_at_infinity_by_contour(raw);
        CHECK(std::abs(residue(w, SpherePoint::infinity()) - ref_inf.value) <= 1e-8 * ref_inf.magnitude);
    }
}

TEST_CASE("residue is bilinear on forms sharing a pole set") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        auto raw1 = oracle::random_form(rng);
        auto raw2 = raw1;
        for (auto& c : raw2.numerator) c = {u(rng), u(rng)};
        const auto w1 = from_raw(raw1);
        const auto w2 = RationalOneForm{RationalFunction::reduced(Polynomial(raw2.numerator),
                                                                  w1.coefficient.poles(), raw2.scale)};
        const Complex alpha{u(rng), u(rng)}, beta{u(rng), u(rng)};
        const RationalOneForm sum{w1.coefficient.scaled(alpha) + w2.coefficient.scaled(beta)};
        for (const auto& p : raw1.poles) {
            const Complex lhs = residue_or_zero(sum, p.location);
            const Complex rhs = alpha * residue(w1, p.location) + beta * residue_or_zero(w2, p.location);
            CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(rhs) + max_residue_magnitude(w1)));
        }
    }
}

TEST_CASE("mobius maps act projectively") {
    const auto sigma = MobiusMap::negation();
    CHECK(close(sigma(I).value(), -I));
    CHECK(sigma(SpherePoint::infinity()).is_infinite());
    CHECK(close(MobiusMap::conjugation()(Complex{1.0, 2.0}).value(), Complex{1.0, -2.0}));
    const MobiusMap inv{0.0, 1.0, 1.0, 0.0};  // z -> 1/z
    CHECK(inv(Complex{0.0}).is_infinite());
    CHECK(close(inv(SpherePoint::infinity()).value(), 0.0));
    CHECK(is_identity(compose(inv, inv), 1e-12));
    CHECK(is_identity(compose(MobiusMap::conjugation(), MobiusMap::conjugation()), 1e-12));
    CHECK_THROWS_AS(check_nondegenerate(MobiusMap{1.0, 2.0, 2.0, 4.0}, 1e-9), InvariantError);
}

TEST_CASE("pullback of forms") {
    const auto sigma = MobiusMap::negation();
    const auto dz_over_z = form(Polynomial({1.0}), {{0.0, 1}});
    CHECK(approx_equal(pullback(sigma, dz_over_z).coefficient, dz_over_z.coefficient, 1e-12));

    const auto w = pullback(sigma, form(Polynomial({1.0}), {{1.0, 1}}));
    CHECK(approx_equal(w.coefficient, RationalFunction(Polynomial({1.0}), {{-1.0, 1}}), 1e-12));

    // Third example, second component, real γ, a, r: invariant under conjugation.
    const double g = 2.0 / 3.0, a = 1.0, r = 2.0;
    const auto om = form(Polynomial({-g * g, 0.0, 1.0}), {{0.0, 1}, {a, 1}, {-a, 1}, {r, 1}, {-r, 1}});
    const auto tw = pullback(MobiusMap::conjugation(), om);
    CHECK(approx_equal(tw.coefficient, om.coefficient.conjugated(), 1e-12));
    CHECK(approx_equal(tw.coefficient, om.coefficient, 1e-12));

    // Complex coefficients are conjugated.
    const auto cw = form(Polynomial({I}), {{I, 1}});
    CHECK(approx_equal(pullback(MobiusMap::conjugation(), cw).coefficient,
                       RationalFunction(Polynomial({-I}), {{-I, 1}}), 1e-12));

    // z -> 1/z moves poles through infinity: dz/(z-2) -> -dz/(z(1 - 2z))
    const MobiusMap inv{0.0, 1.0, 1.0, 0.0};
    const auto iw = pullback(inv, form(Polynomial({1.0}), {{2.0, 1}}));
    for (Complex z : {Complex{0.3, 0.1}, Complex{-1.7, 2.0}})
        CHECK(close(evaluate(iw.coefficient, z), -1.0 / (z * (1.0 - 2.0 * z))));
}

TEST_CASE("pullback by an involution is involutive") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto w = from_raw(oracle::random_form(rng, 4, 2));
        // trace-free matrices square to a multiple of the identity
        const Complex a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
        const MobiusMap m{a, b, c, -a};
        const auto twice = pullback(m, pullback(m, w));
        CHECK(approx_equal(twice.coefficient, w.coefficient, 1e-9));
        const MobiusMap conj_inv{1.0, 0.0, 0.0, 1.0, true};
        CHECK(approx_equal(pullback(conj_inv, pullback(conj_inv, w)).coefficient, w.coefficient, 1e-12));
    }
}

TEST_CASE("epsilon squared from the expansion at an essential point") {
    CHECK(close(epsilon_squared(form(Polynomial({-1.0}), {{0.0, 3}}), SpherePoint::infinity(),
                                LocalParameter::Affine),
                1.0));
    // s dz / (z (z² - a²)) with s = 1/9, a = 1
    const auto om1 = form(Polynomial({1.0}), {{0.0, 1}, {1.0, 1}, {-1.0, 1}}, 1.0 / 9.0);
    CHECK(close(epsilon_squared(om1, SpherePoint::infinity(), LocalParameter::Affine), -1.0 / 9.0));
    const double g = 2.0 / 3.0;
    const auto om2 = form(Polynomial({-g * g, 0.0, 1.0}), {{0.0, 1}, {1.0, 1}, {-1.0, 1}, {2.0, 1}, {-2.0, 1}});
    CHECK(close(epsilon_squared(om2, SpherePoint::infinity(), LocalParameter::Affine), -1.0));

    // finite point, k = 1/z: z dz / (z - 3) -> ε² = lim R(z)/z = -1/3
    const auto fin = form(Polynomial({0.0, 1.0}), {{3.0, 1}});
    CHECK(close(epsilon_squared(fin, Complex{0.0}, LocalParameter::InversePole), -1.0 / 3.0));

    CHECK_THROWS_AS(epsilon_squared(form(Polynomial({1.0}), {{0.0, 1}}), SpherePoint::infinity(),
                                    LocalParameter::Affine),
                    WrongVanishingOrder);
    CHECK_THROWS_AS(epsilon_squared(form(Polynomial({1.0}), {{0.0, 4}}), SpherePoint::infinity(),
                                    LocalParameter::Affine),
                    WrongVanishingOrder);
    CHECK_THROWS_AS(epsilon_squared(fin, Complex{1.0}, LocalParameter::InversePole), WrongVanishingOrder);
}

TEST_CASE("order of a form at a point") {
    const auto w = omega2(1.0, I);
    const double tol = tolerances().point;
    CHECK(order_at(w, Complex{1.0}, tol) == 1);
    CHECK(order_at(w, Complex{0.0}, tol) == -1);
    CHECK(order_at(w, SpherePoint::infinity(), tol) == -1);
    CHECK(order_at(w, Complex{3.0}, tol) == 0);
    const auto dbl = form(Polynomial({1.0, -2.0, 1.0}), {{0.0, 1}});
    CHECK(order_at(dbl, Complex{1.0}, tol) == 2);
}

TEST_CASE("sum of a polynomial and a pole term lifts over the common denominator") {
    const RationalFunction f = RationalFunction::constant(2.0) + RationalFunction::simple_pole(1.0).scaled(3.0);
    for (Complex z : {Complex{0.4, 0.7}, Complex{-2.0, 0.1}, Complex{5.0, -3.0}})
        CHECK(std::abs(evaluate(f, SpherePoint(z)) - (2.0 + 3.0 / (z - 1.0))) < 1e-13);
    const RationalFunction g = RationalFunction::polynomial(Polynomial({0.0, 1.0})) + RationalFunction::simple_pole(-2.0);
    CHECK(std::abs(evaluate(g, SpherePoint(Complex{1.0, 1.0})) - (Complex{1.0, 1.0} + 1.0 / Complex{3.0, 1.0})) < 1e-13);
}
