#include "polariton/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "polariton/errors.hpp"

namespace polariton {

namespace {

using State = std::array<double, 2>;

void check_domain(double xi) {
    if (!(std::abs(xi) <= 1.0)) throw DomainError("xi outside [-1, 1]");
}

void check_pole(double xi, double guard) {
    if (!(std::abs(xi) < 1.0 - guard)) throw PoleError(xi, guard);
}

State rhs(const State& y, const EffectiveCoefficients& k, double guard) {
    const auto v = vector_field({y[0], y[1]}, k, guard);
    return {v.dxi, v.dtheta};
}

TrajectorySample make_sample(double t, const State& y, const EffectiveCoefficients& k) {
    MeanFieldState s{y[0], y[1]};
    return {t, s, hc_energy(s, k), pendulum_length(s.xi, k)};
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;
// Dense output (Hairer's contd5 coefficients).
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

}  // namespace

double MeanFieldState::theta_mod() const {
    double r = std::remainder(theta, 2.0 * std::numbers::pi);
    if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
    return r;
}

double linear_coefficient(const EffectiveCoefficients& k) { return k.N * (k.V1 - k.V2) / 2.0; }
double stiffness_coefficient(const EffectiveCoefficients& k) { return k.N * (k.V1 + k.V2 - 2.0 * k.U) / 4.0; }

double pendulum_length(double xi, const EffectiveCoefficients& k) {
    check_domain(xi);
    return -2.0 * k.N * (k.Tplus + k.Tminus * xi) * std::sqrt(1.0 - xi * xi);
}

double hc_energy(const MeanFieldState& s, const EffectiveCoefficients& k) {
    check_domain(s.xi);
    const double xi = s.xi;
    return linear_coefficient(k) * xi + stiffness_coefficient(k) * xi * xi -
           pendulum_length(xi, k) * std::cos(s.theta);
}

FlowVelocity vector_field(const MeanFieldState& s, const EffectiveCoefficients& k, double xi_guard) {
    check_pole(s.xi, xi_guard);
    const double xi = s.xi;
    const double r = std::sqrt(1.0 - xi * xi);
    const double f = 2.0 * k.N * (k.Tplus + k.Tminus * xi) * r;
    const double fp = 2.0 * k.N * (k.Tminus * (1.0 - 2.0 * xi * xi) - k.Tplus * xi) / r;
    return {f * std::sin(s.theta),
            linear_coefficient(k) + 2.0 * stiffness_coefficient(k) * xi + fp * std::cos(s.theta)};
}

std::array<std::array<double, 2>, 2> jacobian(const MeanFieldState& s, const EffectiveCoefficients& k) {
    check_pole(s.xi, default_xi_guard);
    const double xi = s.xi;
    const double r2 = 1.0 - xi * xi;
    const double r = std::sqrt(r2);
    const double f = 2.0 * k.N * (k.Tplus + k.Tminus * xi) * r;
    const double g = k.Tminus * (1.0 - 2.0 * xi * xi) - k.Tplus * xi;
    const double gp = -4.0 * k.Tminus * xi - k.Tplus;
    const double fp = 2.0 * k.N * g / r;
    const double fpp = 2.0 * k.N * (gp / r + g * xi / (r2 * r));
    const double sn = std::sin(s.theta), cs = std::cos(s.theta);
    return {{{fp * sn, f * cs}, {2.0 * stiffness_coefficient(k) + fpp * cs, -fp * sn}}};
}

PendulumDiagnostics pendulum_diagnostics(const MeanFieldState& s, const EffectiveCoefficients& k) {
    PendulumDiagnostics p;
    p.c = stiffness_coefficient(k);
    p.d = pendulum_length(s.xi, k);
    p.dx = p.d * std::sin(s.theta);
    p.dy = p.d * std::cos(s.theta);
    if (k.V1 == k.V2) {
        const double h = hc_energy(s, k);
        const double rebuilt = p.c * s.xi * s.xi - p.d * std::cos(s.theta);
        const double scale = std::abs(p.c) + std::abs(p.d) + std::abs(h) + std::numeric_limits<double>::min();
        if (std::abs(h - rebuilt) > 1e-12 * scale)
            throw std::logic_error("pendulum form does not reproduce the semiclassical energy");
    }
    return p;
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::completed: return "completed";
        case Termination::pole_approach: return "pole-approach";
        case Termination::stopped: return "stopped";
    }
    return "unknown";
}

double Trajectory::max_energy_drift() const {
    double m = 0.0;
    if (samples.empty()) return m;
    for (const auto& s : samples) m = std::max(m, std::abs(s.energy - samples.front().energy));
    return m;
}

std::array<double, 2> StepView::at(double t) const {
    const double th = (t - t0_) / h_;
    const double th1 = 1.0 - th;
    State y;
    for (int i = 0; i < 2; ++i)
        y[i] = r_[0][i] + th * (r_[1][i] + th1 * (r_[2][i] + th * (r_[3][i] + th1 * r_[4][i])));
    return y;
}

namespace {

Trajectory integrate_pass(const MeanFieldState& s0, const EffectiveCoefficients& k, double t_end,
                          const IntegrateOptions& opts, const StepObserver& observer) {
    if (!(t_end > 0.0)) throw ConfigError("integrate: t_end must be positive");
    if (!(opts.tolerance > 0.0)) throw ConfigError("integrate: tolerance must be positive");
    check_pole(s0.xi, opts.xi_guard);

    Trajectory traj;
    traj.tolerance = opts.tolerance;
    traj.xi_guard = opts.xi_guard;

    const double guard = opts.xi_guard;
    const double tol = opts.tolerance;
    State y{s0.xi, s0.theta};
    double t = 0.0;
    traj.samples.push_back(make_sample(t, y, k));
    double next_sample = opts.sample_dt;

    State k1 = rhs(y, k, guard);
    double h = opts.initial_step;
    if (!(h > 0.0)) {
        const double speed = std::max(std::abs(k1[0]), std::abs(k1[1]));
        h = speed > 0.0 ? 0.01 * std::pow(tol, 0.2) / speed : t_end;
    }
    h = std::min(h, t_end);

    bool last_failure_pole = false;
    while (t < t_end) {
        if (traj.accepted_steps >= opts.max_steps) throw StiffnessError(t, y[0], y[1]);
        if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::abs(t) ||
            h < std::numeric_limits<double>::min()) {
            if (last_failure_pole) {
                traj.termination = Termination::pole_approach;
                break;
            }
            throw StiffnessError(t, y[0], y[1]);
        }
        const bool last = t + h >= t_end;
        if (last) h = t_end - t;

        State k2, k3, k4, k5, k6, k7, y1, ys;
        double err = 0.0;
        try {
            for (int i = 0; i < 2; ++i) ys[i] = y[i] + h * a21 * k1[i];
            k2 = rhs(ys, k, guard);
            for (int i = 0; i < 2; ++i) ys[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
            k3 = rhs(ys, k, guard);
            for (int i = 0; i < 2; ++i) ys[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            k4 = rhs(ys, k, guard);
            for (int i = 0; i < 2; ++i) ys[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            k5 = rhs(ys, k, guard);
            for (int i = 0; i < 2; ++i)
                ys[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            k6 = rhs(ys, k, guard);
            for (int i = 0; i < 2; ++i)
                y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
            k7 = rhs(y1, k, guard);
            double acc = 0.0;
            for (int i = 0; i < 2; ++i) {
                const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                acc += (e / tol) * (e / tol);
            }
            err = std::sqrt(acc / 2.0);
            last_failure_pole = false;
        } catch (const PoleError&) {
            last_failure_pole = true;
            ++traj.rejected_steps;
            h *= 0.25;
            continue;
        }
        if (!std::isfinite(err)) err = 1e10;

        if (err > 1.0) {
            ++traj.rejected_steps;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            continue;
        }

        std::array<State, 5> r;
        for (int i = 0; i < 2; ++i) {
            const double dy = y1[i] - y[i];
            const double bspl = h * k1[i] - dy;
            r[0][i] = y[i];
            r[1][i] = dy;
            r[2][i] = bspl;
            r[3][i] = dy - h * k7[i] - bspl;
            r[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        const double t1 = last ? t_end : t + h;
        const StepView view(t, h, y, y1, r);
        ++traj.accepted_steps;

        if (opts.sample_dt > 0.0) {
            while (next_sample < t1) {
                traj.samples.push_back(make_sample(next_sample, view.at(next_sample), k));
                next_sample = opts.sample_dt * static_cast<double>(traj.samples.size());
            }
            if (last) traj.samples.push_back(make_sample(t1, y1, k));
        } else {
            traj.samples.push_back(make_sample(t1, y1, k));
        }

        t = t1;
        y = y1;
        k1 = k7;
        const bool stop = observer && observer(view);
        if (stop) {
            if (opts.sample_dt > 0.0 && traj.samples.back().t < t) traj.samples.push_back(make_sample(t, y, k));
            traj.termination = Termination::stopped;
            break;
        }
        const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(fac, 0.2, 5.0);
    }
    return traj;
}

}  // namespace

Trajectory integrate(const MeanFieldState& s0, const EffectiveCoefficients& k, double t_end,
                     const IntegrateOptions& opts, const StepObserver& observer) {
    Trajectory traj = integrate_pass(s0, k, t_end, opts, observer);
    if (observer || !(opts.energy_budget > 0.0)) return traj;

    const double budget = opts.energy_budget * std::max(std::abs(traj.samples.front().energy), std::abs(k.N * k.U));
    IntegrateOptions refined = opts;
    while (budget > 0.0 && traj.max_energy_drift() > budget) {
        if (traj.refinements >= opts.max_refinements) {
            std::ostringstream os;
            os << "integrate: energy drift " << traj.max_energy_drift() << " exceeds budget " << budget
               << " at tolerance " << refined.tolerance;
            throw DomainError(os.str());
        }
        refined.tolerance /= 10.0;
        const int n = traj.refinements + 1;
        traj = integrate_pass(s0, k, t_end, refined, observer);
        traj.refinements = n;
    }
    return traj;
}

Trajectory integrate_fixed(const MeanFieldState& s0, const EffectiveCoefficients& k, double t_end, double dt,
                           double xi_guard) {
    if (!(t_end > 0.0) || !(dt > 0.0)) throw ConfigError("integrate_fixed: t_end and dt must be positive");
    Trajectory traj;
    traj.xi_guard = xi_guard;
    State y{s0.xi, s0.theta};
    traj.samples.push_back(make_sample(0.0, y, k));
    const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
    const double h = t_end / static_cast<double>(steps);
    try {
        for (long n = 0; n < steps; ++n) {
            const State q1 = rhs(y, k, xi_guard);
            const State q2 = rhs({y[0] + 0.5 * h * q1[0], y[1] + 0.5 * h * q1[1]}, k, xi_guard);
            const State q3 = rhs({y[0] + 0.5 * h * q2[0], y[1] + 0.5 * h * q2[1]}, k, xi_guard);
            const State q4 = rhs({y[0] + h * q3[0], y[1] + h * q3[1]}, k, xi_guard);
            for (int i = 0; i < 2; ++i) y[i] += h / 6.0 * (q1[i] + 2.0 * q2[i] + 2.0 * q3[i] + q4[i]);
            ++traj.accepted_steps;
            traj.samples.push_back(make_sample(h * static_cast<double>(n + 1), y, k));
        }
    } catch (const PoleError&) {
        traj.termination = Termination::pole_approach;
    }
    return traj;
}

double dw_pendulum_length(double xi, const DoubleWellParams& p) {
    check_domain(xi);
    return 2.0 * p.t * std::sqrt(1.0 - xi * xi);
}

double dw_energy(const MeanFieldState& s, const DoubleWellParams& p) {
    check_domain(s.xi);
    const double lin = p.E_l - p.E_r + p.N * (p.V_l - p.V_r) / 2.0;
    const double quad = p.N * (p.V_l + p.V_r) / 4.0;
    return lin * s.xi + quad * s.xi * s.xi - dw_pendulum_length(s.xi, p) * std::cos(s.theta);
}

FlowVelocity dw_vector_field(const MeanFieldState& s, const DoubleWellParams& p, double xi_guard) {
    check_pole(s.xi, xi_guard);
    const double r = std::sqrt(1.0 - s.xi * s.xi);
    const double lin = p.E_l - p.E_r + p.N * (p.V_l - p.V_r) / 2.0;
    const double quad = p.N * (p.V_l + p.V_r) / 4.0;
    return {-2.0 * p.t * r * std::sin(s.theta), lin + 2.0 * quad * s.xi + 2.0 * p.t * s.xi / r * std::cos(s.theta)};
}

DoubleWellParams matched_double_well(const EffectiveCoefficients& k) {
    if (k.Tminus != 0.0) throw ConfigError("matched_double_well: requires Tminus = 0");
    return {0.0, 0.0, k.V1 - k.U, k.V2 - k.U, -k.N * k.Tplus, k.N};
}

ContourGrid energy_contour_grid(const EffectiveCoefficients& k, const GridSpec& spec) {
    if (spec.n_xi < 2 || spec.n_theta < 2) throw ConfigError("grid: resolution must be at least 2 per axis");
    if (!(spec.xi_min >= -1.0 && spec.xi_max <= 1.0 && spec.xi_min < spec.xi_max))
        throw ConfigError("grid: xi range must lie inside [-1, 1] and be non-empty");
    if (!(spec.theta_min < spec.theta_max)) throw ConfigError("grid: theta range must be non-empty");
    const double nu = k.N * k.U;
    if (nu == 0.0) throw DomainError("grid: energies are normalized by N*U, which is zero");

    ContourGrid g;
    g.xi.resize(spec.n_xi);
    g.theta.resize(spec.n_theta);
    // Endpoints are assigned exactly so that mirrored ranges produce mirrored nodes.
    for (int i = 0; i < spec.n_xi; ++i) {
        const double f = static_cast<double>(i) / (spec.n_xi - 1);
        g.xi[i] = i == spec.n_xi - 1 ? spec.xi_max : spec.xi_min + f * (spec.xi_max - spec.xi_min);
    }
    for (int j = 0; j < spec.n_theta; ++j) {
        const double f = static_cast<double>(j) / (spec.n_theta - 1);
        g.theta[j] = j == spec.n_theta - 1 ? spec.theta_max : spec.theta_min + f * (spec.theta_max - spec.theta_min);
    }
    g.values.resize(g.xi.size() * g.theta.size());
    for (std::size_t i = 0; i < g.xi.size(); ++i)
        for (std::size_t j = 0; j < g.theta.size(); ++j)
            g.values[i * g.theta.size() + j] = hc_energy({g.xi[i], g.theta[j]}, k) / nu;
    return g;
}

}  // namespace polariton
