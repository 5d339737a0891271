#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polariton/meanfield.hpp"

namespace polariton {

enum class ModeLabel { JO, ST, STO, OTT, ON_INVARIANT_LINE, UNRESOLVED };

std::string to_string(ModeLabel l);

// Table lookup: (winding, xi sign record) -> label. Throws for |winding| > 1.
ModeLabel label_for(int winding, bool xi_sign_fixed);

struct ModeClassification {
    ModeLabel label = ModeLabel::UNRESOLVED;
    int winding = 0;
    bool xi_sign_fixed = false;
    double period = 0.0;  // NaN when unresolved
    double winding_residual = 0.0;
    std::string diagnostics;
};

enum class Stability { center, saddle, degenerate };

std::string to_string(Stability s);

struct FixedPoint {
    double xi = 0.0;
    double theta = 0.0;
    Stability stability = Stability::degenerate;
    double exponent = 0.0;  // sqrt(|det J|): frequency of a center, rate of a saddle
};

struct FixedPointReport {
    std::vector<FixedPoint> points;
    bool degenerate_family = false;  // T+ = T- = 0: a whole line (or plane) of fixed points
    std::optional<double> family_xi;
    std::vector<std::string> failures;  // root-finder problems, one entry per bracket
};

FixedPointReport find_fixed_points(const EffectiveCoefficients& k);

// Longest linearized center period, or 2 pi over the largest flow rate when
// there is no center. Sets the period cap and default windows.
double characteristic_period(const EffectiveCoefficients& k);

// xi = -T+/T- when T- != 0 (whether or not it lies in [-1, 1]).
std::optional<double> invariant_line(const EffectiveCoefficients& k);

struct SeparatrixSet {
    std::optional<double> line_xi;
    // Polylines of the second branch at the energy of the invariant line.
    std::vector<std::vector<MeanFieldState>> branches;
    std::vector<FixedPoint> saddles;
    double level = 0.0;  // H_c on the invariant line
};

struct SeparatrixOptions {
    int samples = 2001;
};

SeparatrixSet separatrix(const EffectiveCoefficients& k, const SeparatrixOptions& opts = {});

struct WindingResult {
    int winding = 0;
    double residual = 0.0;  // unrounded turns minus winding
};

// Winding of the pendulum vector (d sin(theta), d cos(theta)) about the origin.
// exclusion_radius < 0 selects the default 1e-9 * N * max(|T+|, |T-|).
WindingResult winding_number(const Trajectory& traj, const EffectiveCoefficients& k, double exclusion_radius = -1.0);

struct PeriodOptions {
    double tolerance = 1e-10;
    double section_tolerance = 1e-6;
    double cap = 0.0;  // model-time cap; 0 uses cap_factor * characteristic_period
    double cap_factor = 1000.0;
};

// First return time to the start on a Poincare section through s0.
std::optional<double> detect_period(const MeanFieldState& s0, const EffectiveCoefficients& k,
                                    const PeriodOptions& opts = {});

// One period sampled densely enough for winding analysis.
Trajectory one_period(const MeanFieldState& s0, const EffectiveCoefficients& k, double period, double tolerance,
                      int substeps = 8);

ModeClassification classify(const MeanFieldState& s0, const EffectiveCoefficients& k, const PeriodOptions& opts = {});

}  // namespace polariton
