#include "polariton/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "polariton/errors.hpp"
#include "polariton/meanfield.hpp"

namespace polariton {

namespace {

double energy_scale(const EffectiveCoefficients& k) {
    const double u = std::abs(k.U);
    if (u > 0.0) return u;
    return std::max({std::abs(k.V1), std::abs(k.V2), std::abs(k.Tplus), std::abs(k.Tminus), 1.0});
}

}  // namespace

std::string to_string(GroundPhase p) {
    switch (p) {
        case GroundPhase::THETA_0: return "THETA_0";
        case GroundPhase::THETA_PI: return "THETA_PI";
        case GroundPhase::CRITICAL: return "CRITICAL";
    }
    return "CRITICAL";
}

SliceMinimum minimize_slice(const EffectiveCoefficients& k, double theta, int grid) {
    if (grid < 3) throw ConfigError("minimize_slice: grid needs at least 3 points");
    if (!(k.N > 0.0)) throw DomainError("minimize_slice: N must be positive");
    auto f = [&](double xi) { return hc_energy({xi, theta}, k) / k.N; };

    int best = 0;
    double fbest = f(-1.0);
    std::vector<double> xs(grid);
    for (int i = 0; i < grid; ++i) {
        xs[i] = i == grid - 1 ? 1.0 : -1.0 + 2.0 * i / (grid - 1);
        const double v = f(xs[i]);
        if (v < fbest) {
            fbest = v;
            best = i;
        }
    }
    const double lo = xs[std::max(best - 1, 0)];
    const double hi = xs[std::min(best + 1, grid - 1)];
    std::uintmax_t iters = 200;
    auto [x, fx] = boost::math::tools::brent_find_minima(f, lo, hi, 30, iters);
    // Keep the grid point if the refinement did not improve on it (endpoint minima).
    if (fx <= fbest) return {x, fx};
    return {xs[best], fbest};
}

GroundStateResult ground_state(const EffectiveCoefficients& k, const GroundStateOptions& opts) {
    GroundStateResult r;
    const auto s0 = minimize_slice(k, 0.0, opts.grid);
    const auto sp = minimize_slice(k, std::numbers::pi, opts.grid);
    r.e0 = s0.energy;
    r.xi0 = s0.xi;
    r.e_pi = sp.energy;
    r.xi_pi = sp.xi;
    const double band = opts.tie_band * energy_scale(k);
    if (std::abs(r.e0 - r.e_pi) <= band) r.phase = GroundPhase::CRITICAL;
    else r.phase = r.e_pi < r.e0 ? GroundPhase::THETA_PI : GroundPhase::THETA_0;
    const double xg = r.phase == GroundPhase::THETA_PI ? r.xi_pi : r.xi0;
    r.d_g = pendulum_length(xg, k);
    const double kerr = std::min({std::abs(k.V1), std::abs(k.V2), std::abs(k.U)});
    r.outside_strong_interaction = std::max(std::abs(k.Tplus), std::abs(k.Tminus)) > 0.1 * kerr;
    return r;
}

CriticalSearch critical_tminus(const EffectiveCoefficients& templ, double lo, double hi, const CriticalOptions& opts) {
    if (!(lo < hi)) throw ConfigError("critical_tminus: empty search interval");
    if (opts.prescan < 2) throw ConfigError("critical_tminus: prescan needs at least 2 points");
    auto gap = [&](double tm) {
        EffectiveCoefficients k = templ;
        k.Tminus = tm;
        const auto g = ground_state(k, opts.ground);
        return g.e0 - g.e_pi;
    };

    CriticalSearch out;
    const double tol = opts.tolerance * energy_scale(templ);
    double xa = lo, fa = gap(lo);
    for (int i = 1; i < opts.prescan; ++i) {
        const double xb = i == opts.prescan - 1 ? hi : lo + (hi - lo) * i / (opts.prescan - 1);
        const double fb = gap(xb);
        if (fa == 0.0) {
            out.crossings.push_back(xa);
        } else if (fa * fb < 0.0) {
            std::uintmax_t iters = 200;
            auto [r0, r1] = boost::math::tools::bisect(
                gap, xa, xb, [tol](double a, double b) { return std::abs(b - a) <= tol; }, iters);
            out.crossings.push_back(0.5 * (r0 + r1));
        }
        xa = xb;
        fa = fb;
    }
    if (fa == 0.0) out.crossings.push_back(xa);
    out.ambiguous = out.crossings.size() > 1;
    return out;
}

}  // namespace polariton
