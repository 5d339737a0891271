#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "polariton/coefficients.hpp"

namespace polariton {

inline constexpr double default_xi_guard = 1e-12;

// Population imbalance xi in [-1, 1] and unwrapped relative phase theta.
struct MeanFieldState {
    double xi = 0.0;
    double theta = 0.0;

    // theta reduced to (-pi, pi].
    double theta_mod() const;
};

struct FlowVelocity {
    double dxi = 0.0;
    double dtheta = 0.0;
};

double hc_energy(const MeanFieldState& s, const EffectiveCoefficients& k);
FlowVelocity vector_field(const MeanFieldState& s, const EffectiveCoefficients& k, double xi_guard = default_xi_guard);

// Coefficients of the quadratic and linear xi terms of the energy.
double linear_coefficient(const EffectiveCoefficients& k);     // N (V1 - V2) / 2
double stiffness_coefficient(const EffectiveCoefficients& k);  // N (V1 + V2 - 2U) / 4

// Effective pendulum length d = -2N (T+ + T- xi) sqrt(1 - xi^2).
double pendulum_length(double xi, const EffectiveCoefficients& k);

struct PendulumDiagnostics {
    double c = 0.0;
    double d = 0.0;
    double dx = 0.0;
    double dy = 0.0;
};

PendulumDiagnostics pendulum_diagnostics(const MeanFieldState& s, const EffectiveCoefficients& k);

// Analytic Jacobian of (dxi/dt, dtheta/dt) with respect to (xi, theta).
std::array<std::array<double, 2>, 2> jacobian(const MeanFieldState& s, const EffectiveCoefficients& k);

struct TrajectorySample {
    double t = 0.0;
    MeanFieldState state;
    double energy = 0.0;
    double d = 0.0;
};

enum class Termination { completed, pole_approach, stopped };

std::string to_string(Termination t);

struct Trajectory {
    std::vector<TrajectorySample> samples;
    double tolerance = 0.0;  // tolerance of the pass that produced the samples
    int refinements = 0;
    double xi_guard = default_xi_guard;
    Termination termination = Termination::completed;
    long accepted_steps = 0;
    long rejected_steps = 0;

    double max_energy_drift() const;
};

struct IntegrateOptions {
    double tolerance = 1e-10;
    double xi_guard = default_xi_guard;
    // Sampling cadence in model time; 0 records every accepted step.
    double sample_dt = 0.0;
    double initial_step = 0.0;  // 0 chooses automatically
    long max_steps = 50'000'000;
    // Drift budget relative to max(|H_c(0)|, N |U|); 0 disables the check.
    // A run over budget is repeated with the tolerance divided by 10.
    double energy_budget = 1e-8;
    int max_refinements = 3;
};

// Dense-output view of one accepted step, handed to step observers.
class StepView {
public:
    StepView(double t0, double h, const std::array<double, 2>& y0, const std::array<double, 2>& y1,
             const std::array<std::array<double, 2>, 5>& rcont)
        : t0_(t0), h_(h), y0_(y0), y1_(y1), r_(rcont) {}

    double t0() const { return t0_; }
    double t1() const { return t0_ + h_; }
    const std::array<double, 2>& y0() const { return y0_; }
    const std::array<double, 2>& y1() const { return y1_; }
    std::array<double, 2> at(double t) const;

private:
    double t0_, h_;
    std::array<double, 2> y0_, y1_;
    std::array<std::array<double, 2>, 5> r_;
};

// Return true to stop the integration after this step.
using StepObserver = std::function<bool(const StepView&)>;

// Adaptive Dormand-Prince 5(4) integration of the mean-field flow.
// The tolerance bounds the per-step local error of both xi and theta (both O(1)).
// Without an observer the energy budget is enforced (DomainError if refinement
// cannot meet it); observer-driven runs are single pass.
Trajectory integrate(const MeanFieldState& s0, const EffectiveCoefficients& k, double t_end,
                     const IntegrateOptions& opts = {}, const StepObserver& observer = {});

// Classical fixed-step RK4, for reproducibility checks.
Trajectory integrate_fixed(const MeanFieldState& s0, const EffectiveCoefficients& k, double t_end, double dt,
                           double xi_guard = default_xi_guard);

// Standard double-well reference model.
struct DoubleWellParams {
    double E_l = 0.0;
    double E_r = 0.0;
    double V_l = 0.0;
    double V_r = 0.0;
    double t = 0.0;
    double N = 1.0;
};

double dw_energy(const MeanFieldState& s, const DoubleWellParams& p);
FlowVelocity dw_vector_field(const MeanFieldState& s, const DoubleWellParams& p, double xi_guard = default_xi_guard);
double dw_pendulum_length(double xi, const DoubleWellParams& p);

// Double-well parameters whose energy coincides with H_c when T- = 0.
DoubleWellParams matched_double_well(const EffectiveCoefficients& k);

// Energy grid in units of N*U. values[i * theta.size() + j] = H_c(xi[i], theta[j]) / (N U).
struct ContourGrid {
    std::vector<double> xi;
    std::vector<double> theta;
    std::vector<double> values;

    double at(std::size_t i_xi, std::size_t j_theta) const { return values[i_xi * theta.size() + j_theta]; }
};

struct GridSpec {
    double xi_min = -1.0;
    double xi_max = 1.0;
    double theta_min = -3.141592653589793;
    double theta_max = 3.141592653589793;
    int n_xi = 201;
    int n_theta = 201;
};

ContourGrid energy_contour_grid(const EffectiveCoefficients& k, const GridSpec& spec);

}  // namespace polariton
