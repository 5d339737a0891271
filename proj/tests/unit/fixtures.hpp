#pragma once

#include <numbers>

#include "polariton/coefficients.hpp"

namespace fixtures {

inline constexpr double pi = std::numbers::pi;

// The committed validation set (validation/validation_params.json).
inline polariton::MicroscopicParams validation_set() {
    polariton::MicroscopicParams p;
    p.g = 1.0;
    p.omega = 2.37;
    p.epsilon = 0.0368;
    p.delta = 1.53;
    p.delta5 = -0.05278425396838432;
    p.delta6 = 0.049425768862382397;
    p.g25 = 0.001199;
    p.g36 = 0.001131;
    p.omega_nu1 = 0.118;
    p.omega_nu2 = 0.124;
    p.mw_detuning = 0.0;
    p.delta_prime = 0.01236;
    return p;
}

inline polariton::EffectiveCoefficients coeffs(double V1, double V2, double U, double Tp, double Tm, double N) {
    return {V1, V2, U, Tp, Tm, N};
}

// V1 = V2 = 5U/4, T+ = (V1 + V2 - 2U)/40.
inline polariton::EffectiveCoefficients taxonomy(double tminus_over_tplus, double N = 1.0) {
    const double tp = (2.5 - 2.0) / 40.0;
    return {1.25, 1.25, 1.0, tp, tminus_over_tplus * tp, N};
}

inline polariton::EffectiveCoefficients transition(double V2, double Tm = 0.0, double N = 1000.0) {
    return {1.5, V2, 1.0, 0.03, Tm, N};
}

}  // namespace fixtures
