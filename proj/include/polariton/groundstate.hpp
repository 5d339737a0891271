#pragma once

#include <string>
#include <vector>

#include "polariton/coefficients.hpp"

namespace polariton {

struct SliceMinimum {
    double xi = 0.0;
    double energy = 0.0;  // H_c / N
};

// Global minimum of H_c(xi, theta) / N over xi in [-1, 1]: grid pre-scan, then Brent refinement.
SliceMinimum minimize_slice(const EffectiveCoefficients& k, double theta, int grid = 2001);

enum class GroundPhase { THETA_0, THETA_PI, CRITICAL };

std::string to_string(GroundPhase p);

struct GroundStateResult {
    double e0 = 0.0;
    double e_pi = 0.0;
    double xi0 = 0.0;
    double xi_pi = 0.0;
    GroundPhase phase = GroundPhase::CRITICAL;
    double d_g = 0.0;
    // |T+-| not small against the Kerr terms (ratio above 0.1).
    bool outside_strong_interaction = false;
};

struct GroundStateOptions {
    int grid = 2001;
    double tie_band = 1e-12;  // in units of |U|
};

GroundStateResult ground_state(const EffectiveCoefficients& k, const GroundStateOptions& opts = {});

struct CriticalSearch {
    std::vector<double> crossings;  // empty means no transition
    bool ambiguous = false;         // more than one sign change in the interval
};

struct CriticalOptions {
    int prescan = 401;
    double tolerance = 1e-8;  // absolute, in units of |U|
    GroundStateOptions ground;
};

// T- values in [lo, hi] where e0 - e_pi changes sign, with the remaining coefficients taken from the template.
CriticalSearch critical_tminus(const EffectiveCoefficients& templ, double lo, double hi,
                               const CriticalOptions& opts = {});

}  // namespace polariton
