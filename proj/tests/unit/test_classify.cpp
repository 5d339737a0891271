#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "fixtures.hpp"
#include "polariton/classify.hpp"
#include "polariton/errors.hpp"

using namespace polariton;
using fixtures::pi;

namespace {

int count(const FixedPointReport& r, Stability s) {
    return static_cast<int>(std::count_if(r.points.begin(), r.points.end(), [&](const FixedPoint& p) { return p.stability == s; }));
}

}  // namespace

TEST_CASE("label table") {
    CHECK(label_for(0, false) == ModeLabel::JO);
    CHECK(label_for(0, true) == ModeLabel::STO);
    CHECK(label_for(1, true) == ModeLabel::ST);
    CHECK(label_for(-1, true) == ModeLabel::ST);
    CHECK(label_for(1, false) == ModeLabel::OTT);
    CHECK_THROWS_AS(label_for(2, false), InconclusiveError);
    CHECK(to_string(ModeLabel::OTT) == "OTT");
}

TEST_CASE("fixed points") {
    SUBCASE("T- = 0 has a center at (0, pi)") {
        const auto r = find_fixed_points(fixtures::taxonomy(0.0));
        CHECK_FALSE(r.degenerate_family);
        const auto it = std::find_if(r.points.begin(), r.points.end(), [](const FixedPoint& p) {
            return std::abs(p.xi) < 1e-12 && std::abs(std::abs(p.theta) - pi) < 1e-12;
        });
        REQUIRE(it != r.points.end());
        CHECK(it->stability == Stability::center);
        // Linearization at (0, pi): sqrt(2 N T+ (2b + 2 N T+)).
        const auto k = fixtures::taxonomy(0.0);
        const double w = std::sqrt(2.0 * k.Tplus * (2.0 * stiffness_coefficient(k) + 2.0 * k.Tplus));
        CHECK(it->exponent == doctest::Approx(w).epsilon(1e-10));
        CHECK(r.failures.empty());
    }
    SUBCASE("every reported point is stationary") {
        for (double ratio : {0.0, -2.4, -5.0, 3.0}) {
            const auto k = fixtures::taxonomy(ratio, 7.0);
            for (const auto& p : find_fixed_points(k).points) {
                const auto v = vector_field({p.xi, p.theta}, k);
                CHECK(std::abs(v.dxi) < 1e-10);
                CHECK(std::abs(v.dtheta) < 1e-10);
            }
        }
    }
    SUBCASE("saddles on the invariant line") {
        const auto k = fixtures::taxonomy(-5.0);
        const auto r = find_fixed_points(k);
        const auto set = separatrix(k);
        CHECK(set.saddles.size() == 2);
        for (const auto& s : set.saddles) {
            CHECK(s.xi == doctest::Approx(0.2));
            CHECK(s.stability == Stability::saddle);
        }
        int on_line = 0;
        for (const auto& p : r.points)
            if (std::abs(p.xi - 0.2) < 1e-9 && p.stability == Stability::saddle) ++on_line;
        CHECK(on_line == 2);
        // Below the threshold the saddles leave the sphere.
        CHECK(separatrix(fixtures::taxonomy(-2.4)).saddles.empty());
    }
    SUBCASE("no tunneling gives a degenerate family") {
        const auto k = fixtures::coeffs(1.6, 1.2, 1.0, 0.0, 0.0, 3.0);
        const auto r = find_fixed_points(k);
        CHECK(r.degenerate_family);
        REQUIRE(r.family_xi.has_value());
        CHECK(*r.family_xi == doctest::Approx(-linear_coefficient(k) / (2.0 * stiffness_coefficient(k))));
    }
    SUBCASE("centers exist in every taxonomy case") {
        for (double ratio : {0.0, -2.4, -5.0}) CHECK(count(find_fixed_points(fixtures::taxonomy(ratio)), Stability::center) >= 1);
    }
}

TEST_CASE("invariant line") {
    CHECK_FALSE(invariant_line(fixtures::taxonomy(0.0)).has_value());
    CHECK(*invariant_line(fixtures::taxonomy(-5.0)) == doctest::Approx(0.2));
    // Reported even when it lies off the sphere.
    CHECK(*invariant_line(fixtures::taxonomy(-0.5)) == doctest::Approx(2.0));
    CHECK_FALSE(separatrix(fixtures::taxonomy(-0.5)).line_xi.has_value());
    CHECK_THROWS_AS(separatrix(fixtures::taxonomy(0.0)), ConfigError);
}

TEST_CASE("separatrix branch sits on the line's energy") {
    const auto k = fixtures::taxonomy(-5.0);
    const auto set = separatrix(k);
    REQUIRE_FALSE(set.branches.empty());
    CHECK(set.level == doctest::Approx(hc_energy({0.2, 0.0}, k)));
    double worst = 0.0;
    for (const auto& b : set.branches)
        for (const auto& s : b) worst = std::max(worst, std::abs(hc_energy(s, k) - set.level));
    CHECK(worst <= 1e-10);
}

TEST_CASE("periods") {
    SUBCASE("free rotor") {
        const auto k = fixtures::coeffs(1.5, 1.0, 0.7, 0.0, 0.0, 4.0);
        const MeanFieldState s0{0.3, 0.1};
        const double rate = linear_coefficient(k) + 2.0 * stiffness_coefficient(k) * 0.3;
        const auto p = detect_period(s0, k);
        REQUIRE(p.has_value());
        CHECK(std::abs(*p - 2.0 * pi / std::abs(rate)) <= 1e-6);
    }
    SUBCASE("small oscillation matches the linearized frequency") {
        const auto k = fixtures::taxonomy(0.0, 20.0);
        const auto r = find_fixed_points(k);
        const auto c = std::find_if(r.points.begin(), r.points.end(), [](const FixedPoint& p) {
            return p.stability == Stability::center && std::abs(p.xi) < 1e-12;
        });
        REQUIRE(c != r.points.end());
        const auto p = detect_period({c->xi + 1e-3, c->theta}, k);
        REQUIRE(p.has_value());
        CHECK(*p == doctest::Approx(2.0 * pi / c->exponent).epsilon(0.01));
    }
    SUBCASE("fixed point has no period") {
        const auto p = detect_period({0.0, 0.0}, fixtures::taxonomy(0.0));
        CHECK_FALSE(p.has_value());
    }
}

TEST_CASE("classification examples") {
    SUBCASE("T- = 0") {
        const auto k = fixtures::taxonomy(0.0);
        CHECK(classify({0.05, pi}, k).label == ModeLabel::JO);
        CHECK(classify({0.3, pi}, k).label == ModeLabel::JO);
        CHECK(classify({0.3, 0.0}, k).label == ModeLabel::ST);
        const auto st = classify({0.9, 0.0}, k);
        CHECK(st.label == ModeLabel::ST);
        CHECK(st.xi_sign_fixed);
        CHECK(std::abs(st.winding) == 1);
        CHECK(std::isfinite(st.period));
    }
    SUBCASE("T- = -5 T+") {
        const auto k = fixtures::taxonomy(-5.0);
        CHECK(classify({0.45, 0.0}, k).label == ModeLabel::STO);
        CHECK(classify({0.15, 0.0}, k).label == ModeLabel::OTT);
        CHECK(classify({-0.45, 0.0}, k).label == ModeLabel::ST);
        CHECK(classify({0.15, pi}, k).label == ModeLabel::JO);
        // H(0.6, 0) equals the invariant-line energy: the orbit runs into a saddle.
        const auto sep = classify({0.6, 0.0}, k);
        CHECK(sep.label == ModeLabel::UNRESOLVED);
        CHECK_FALSE(sep.diagnostics.empty());
        // H(-0.6, 0) equals the energy at the south pole.
        CHECK(classify({-0.6, 0.0}, k).label == ModeLabel::UNRESOLVED);
    }
    SUBCASE("fixed point is unresolved with a diagnostic") {
        const auto mc = classify({0.0, pi}, fixtures::taxonomy(0.0));
        CHECK(mc.label == ModeLabel::UNRESOLVED);
        CHECK_FALSE(mc.diagnostics.empty());
        CHECK(std::isnan(mc.period));
    }
    SUBCASE("pole start is rejected") { CHECK_THROWS_AS(classify({1.0, 0.0}, fixtures::taxonomy(0.0)), DomainError); }
}

TEST_CASE("winding is stable under tolerance refinement") {
    const auto k = fixtures::taxonomy(-5.0);
    for (MeanFieldState s0 : {MeanFieldState{0.45, 0.0}, MeanFieldState{-0.45, 0.0}, MeanFieldState{0.9, 1.0},
                              MeanFieldState{-0.2, 2.0}}) {
        PeriodOptions fine;
        fine.tolerance = 5e-11;
        const auto a = classify(s0, k);
        const auto b = classify(s0, k, fine);
        CHECK(a.label == b.label);
        CHECK(a.winding == b.winding);
        CHECK(std::abs(a.winding_residual) < 1e-3);
    }
}

TEST_CASE("mirror symmetry of labels") {
    const auto a = fixtures::taxonomy(-5.0);
    const auto b = fixtures::taxonomy(5.0);
    for (double xi : {-0.75, -0.35, 0.05, 0.45, 0.85})
        for (double th : {-2.5, -0.5, 1.5}) {
            const auto la = classify({xi, th}, a);
            const auto lb = classify({-xi, -th}, b);
            CHECK(la.label == lb.label);
            CHECK(la.winding == -lb.winding);
        }
}
