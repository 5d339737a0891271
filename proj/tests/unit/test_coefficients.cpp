#include <cmath>

#include <doctest.h>

#include "fixtures.hpp"
#include "polariton/coefficients.hpp"
#include "polariton/errors.hpp"

using namespace polariton;
using fixtures::validation_set;

namespace {

MicroscopicParams spectrum_params(double eps) {
    MicroscopicParams p;
    p.g = 1.0;
    p.omega = 0.3;
    p.delta = 0.4;
    p.epsilon = eps;
    return p;
}

}  // namespace

TEST_CASE("single-particle matrices") {
    SUBCASE("decoupled two-level block") {
        MicroscopicParams p;
        p.g = 1.0;
        const auto m = single_particle_matrices(p);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m.c1);
        CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0));
        CHECK(es.eigenvalues()(1) == doctest::Approx(0.0));
        CHECK(es.eigenvalues()(2) == doctest::Approx(0.0));
        CHECK(es.eigenvalues()(3) == doctest::Approx(1.0));
    }
    SUBCASE("microwave arrow matrix") {
        MicroscopicParams p;
        p.omega_nu1 = p.omega_nu2 = 1.0;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(single_particle_matrices(p).c2);
        CHECK(es.eigenvalues()(0) == doctest::Approx(-std::sqrt(2.0) / 2.0));
        CHECK(es.eigenvalues()(1) == doctest::Approx(0.0));
        CHECK(es.eigenvalues()(2) == doctest::Approx(std::sqrt(2.0) / 2.0));
    }
    SUBCASE("exact symmetry and layout") {
        auto p = validation_set();
        p.mw_detuning = 0.01;
        const auto m = single_particle_matrices(p);
        CHECK((m.c1 - m.c1.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((m.c2 - m.c2.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(m.c1(0, 0) == p.epsilon);
        CHECK(m.c1(1, 1) == -p.epsilon);
        CHECK(m.c1(2, 2) == p.delta);
        CHECK(m.c1(0, 2) == doctest::Approx(std::sqrt(2.0) * p.omega / 2.0));
        CHECK(m.c1(1, 2) == doctest::Approx(std::sqrt(2.0) * p.omega / 2.0));
        CHECK(m.c1(2, 3) == p.g);
        CHECK(m.c2(2, 2) == p.mw_detuning);
        CHECK(m.c2(0, 2) == doctest::Approx(p.omega_nu1 / 2.0));
        CHECK(m.c2(1, 2) == doctest::Approx(p.omega_nu2 / 2.0));
    }
}

TEST_CASE("spectrum") {
    SUBCASE("orthonormal eigenvectors and closed-form gamma") {
        const auto s = diagonalize_spectrum(validation_set());
        CHECK((s.eigvecs_c1.transpose() * s.eigvecs_c1 - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((s.eigvecs_c2.transpose() * s.eigvecs_c2 - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        const double wn = std::hypot(0.118, 0.124);
        CHECK(s.gamma[0] == 0.0);
        CHECK(s.gamma[1] == doctest::Approx(wn / 2.0).epsilon(1e-14));
        CHECK(s.gamma[2] == doctest::Approx(-wn / 2.0).epsilon(1e-14));
    }
    SUBCASE("validation-set eigenvalues against an independent oracle") {
        const auto s = diagonalize_spectrum(validation_set());
        CHECK(s.lambda[0] == doctest::Approx(0.014437895846574565).epsilon(1e-10));
        CHECK(s.lambda[1] == doctest::Approx(-0.014172126984192162).epsilon(1e-10));
        CHECK(s.lambda[2] == doctest::Approx(3.44879668).epsilon(1e-8));
        CHECK(s.lambda[3] == doctest::Approx(-1.91906244).epsilon(1e-8));
    }
    SUBCASE("dark pair at zero two-photon detuning") {
        const auto p = spectrum_params(0.0);
        const auto s = diagonalize_spectrum(p);
        CHECK(std::abs(s.lambda[0]) < 1e-12);
        CHECK(std::abs(s.lambda[1]) < 1e-12);
        // Both quasi-dark vectors have no S14 or a weight.
        for (int c = 0; c < 2; ++c) {
            CHECK(std::abs(s.eigvecs_c1(2, c)) < 1e-12);
        }
    }
    SUBCASE("printed perturbative pair: 1e-4 at eps = 1e-3 Omega, second-order convergence") {
        auto rel = [](double eps) {
            const auto p = spectrum_params(eps);
            const auto ex = diagonalize_spectrum(p).lambda;
            const auto pr = printed_lambda(p);
            return std::max(std::abs(ex[0] - pr[0]) / std::abs(ex[0]), std::abs(ex[1] - pr[1]) / std::abs(ex[1]));
        };
        const double e = 1e-3 * 0.3;
        CHECK(rel(e) <= 1e-4);
        CHECK(std::log2(rel(e) / rel(e / 2)) >= 1.9);
        CHECK(std::log2(rel(e / 2) / rel(e / 4)) >= 1.9);
    }
    SUBCASE("closed-form quasi-dark vectors") {
        const auto p = spectrum_params(1e-3 * 0.3);
        const auto P = quasi_dark_modes(p);
        CHECK(P[0].norm() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(P[1].norm() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(P[0].dot(P[1])) < 1e-14);
        const auto s = diagonalize_spectrum(p);
        CHECK(std::abs(P[0].dot(s.eigvecs_c1.col(0))) >= 1 - 1e-4);
        CHECK(std::abs(P[1].dot(s.eigvecs_c1.col(1))) >= 1 - 1e-4);

        MicroscopicParams bare;
        bare.g = 1.0;
        const auto B = quasi_dark_modes(bare);
        CHECK(B[0](0) == doctest::Approx(1.0));
        CHECK(B[1](1) == doctest::Approx(1.0));
    }
    SUBCASE("quasi-dark pair colliding with the bright pair") {
        // Omega = 0, delta = 0: eigenvalues {eps, -eps, +-g} all of magnitude 1.
        MicroscopicParams p;
        p.g = 1.0;
        p.epsilon = 1.0;
        CHECK_THROWS_AS(diagonalize_spectrum(p), AmbiguityError);
    }
}

TEST_CASE("effective coefficients") {
    SUBCASE("validation set against an independent oracle") {
        const auto k = effective_coefficients(validation_set(), 2.0);
        CHECK(k.V1 == doctest::Approx(7.365593895078859e-06).epsilon(1e-10));
        CHECK(k.V2 == doctest::Approx(-8.825526557876556e-06).epsilon(1e-10));
        CHECK(k.U == doctest::Approx(-2.0341568646152975e-07).epsilon(1e-10));
        CHECK(k.Tplus == doctest::Approx(-3.2083350294056613e-07).epsilon(1e-10));
        CHECK(k.Tminus == doctest::Approx(2.5009587145322694e-06).epsilon(1e-10));
        CHECK(k.N == 2.0);
    }
    SUBCASE("vanishing drive or couplings") {
        auto p = validation_set();
        p.omega = 0.0;
        const auto k = effective_coefficients(p, 5.0);
        CHECK((k.V1 == 0.0 && k.V2 == 0.0 && k.U == 0.0 && k.Tplus == 0.0 && k.Tminus == 0.0));
        auto q = validation_set();
        q.g25 = q.g36 = 0.0;
        const auto z = effective_coefficients(q, 5.0);
        CHECK((z.V1 == 0.0 && z.V2 == 0.0 && z.U == 0.0 && z.Tplus == 0.0 && z.Tminus == 0.0));
    }
    SUBCASE("T+ + T- keeps only the shifted bracket") {
        const auto p = validation_set();
        const auto k = effective_coefficients(p, 2.0);
        const auto s = diagonalize_spectrum(p);
        const double w = std::hypot(p.g, p.omega), wn2 = p.omega_nu1 * p.omega_nu1 + p.omega_nu2 * p.omega_nu2;
        const double x = p.delta_prime + s.lambda[1] - s.lambda[0];
        const double bracket = 0.5 / (x + s.gamma[1]) + 0.5 / (x + s.gamma[2]) - 1.0 / x;
        const double expected = -(p.g * p.g25 * p.g36 * p.omega * p.omega * p.omega_nu1 * p.omega_nu2) /
                                (8.0 * w * w * w * wn2) * (p.g / w - 1.0) * 2.0 * bracket;
        CHECK(k.Tplus + k.Tminus == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("sign flip of both microwave couplings") {
        auto p = validation_set();
        const auto a = effective_coefficients(p, 2.0);
        p.omega_nu1 = -p.omega_nu1;
        p.omega_nu2 = -p.omega_nu2;
        const auto b = effective_coefficients(p, 2.0);
        CHECK(a.V1 == doctest::Approx(b.V1).epsilon(1e-13));
        CHECK(a.U == doctest::Approx(b.U).epsilon(1e-13));
        CHECK(a.Tplus == doctest::Approx(b.Tplus).epsilon(1e-13));
        CHECK(a.Tminus == doctest::Approx(b.Tminus).epsilon(1e-13));
    }
    SUBCASE("zero microwave coupling is the continuous limit") {
        auto p = validation_set();
        p.omega_nu1 = p.omega_nu2 = 0.0;
        const auto z = effective_coefficients(p, 2.0);
        p.omega_nu1 = 1e-7;
        p.omega_nu2 = 1e-7;
        const auto s = effective_coefficients(p, 2.0);
        CHECK(z.V1 == doctest::Approx(s.V1).epsilon(1e-8));
        CHECK(z.V2 == doctest::Approx(s.V2).epsilon(1e-8));
        CHECK(z.U == doctest::Approx(s.U).epsilon(1e-8));
        CHECK(std::abs(z.Tplus) < 1e-15);
    }
    SUBCASE("continuity: central differences stable under halving") {
        auto at = [](double dp) {
            auto p = validation_set();
            p.delta_prime = dp;
            return effective_coefficients(p, 2.0).V1;
        };
        const double x = 0.01236;
        const double d1 = (at(x + 1e-5) - at(x - 1e-5)) / 2e-5;
        const double d2 = (at(x + 5e-6) - at(x - 5e-6)) / 1e-5;
        CHECK(d1 == doctest::Approx(d2).epsilon(1e-6));
    }
    SUBCASE("near resonance names the denominator") {
        auto p = validation_set();
        p.delta_prime = 1e-12;
        try {
            (void)effective_coefficients(p, 2.0);
            FAIL("expected NearResonanceError");
        } catch (const NearResonanceError& e) {
            CHECK(e.denominator() == "delta'");
            CHECK(std::string(e.what()).find("delta'") != std::string::npos);
        }
    }
}

TEST_CASE("regime report") {
    SUBCASE("validation set passes with the recorded ratios") {
        const auto r = validate_regime(validation_set());
        CHECK(r.pass);
        CHECK(r.resonance_ok);
        CHECK(r.coupling_ratio == doctest::Approx(0.09496).epsilon(1e-3));
        CHECK(r.separation_ratio == doctest::Approx(0.0934).epsilon(1e-3));
        CHECK(r.denominator_ratio == doctest::Approx(0.0970).epsilon(1e-3));
        CHECK(std::abs(r.residual_delta5) < 1e-15);
        CHECK(std::abs(r.residual_delta6) < 1e-15);
        for (const auto& rec : r.records) CHECK(rec.pass);
    }
    SUBCASE("strong cavity coupling fails the first inequality") {
        auto p = validation_set();
        p.g25 = 0.5 * p.delta_prime;
        const auto r = validate_regime(p);
        CHECK_FALSE(r.pass);
        CHECK(r.coupling_ratio > 0.1);
    }
    SUBCASE("resonance residuals with only g") {
        MicroscopicParams p;
        p.g = 1.0;
        p.delta5 = 0.3;
        p.delta6 = -0.2;
        p.delta_prime = 0.05;
        const auto r = validate_regime(p);
        CHECK(r.residual_delta5 == doctest::Approx(0.3 - 0.05));
        CHECK(r.residual_delta6 == doctest::Approx(-0.2 - 0.05));
        CHECK_FALSE(r.resonance_ok);
    }
    SUBCASE("resonant detunings close the residuals") {
        auto p = validation_set();
        p.delta5 = p.delta6 = 0.0;
        const auto q = with_resonant_detunings(p);
        const auto r = validate_regime(q);
        CHECK(std::abs(r.residual_delta5) < 1e-15);
        CHECK(std::abs(r.residual_delta6) < 1e-15);
        CHECK(q.delta5 == doctest::Approx(-0.05278425396838432).epsilon(1e-12));
    }
}

TEST_CASE("parameter validation") {
    MicroscopicParams p;
    p.g = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.g = 1.0;
    p.omega = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.omega = NAN;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}
