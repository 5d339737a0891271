#include "polariton/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "polariton/errors.hpp"

namespace polariton {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double flow_rate_scale(const EffectiveCoefficients& k) {
    return std::abs(linear_coefficient(k)) + 2.0 * std::abs(stiffness_coefficient(k)) +
           2.0 * k.N * (std::abs(k.Tplus) + std::abs(k.Tminus));
}

double determinant(const MeanFieldState& s, const EffectiveCoefficients& k) {
    const auto j = jacobian(s, k);
    return j[0][0] * j[1][1] - j[0][1] * j[1][0];
}

FixedPoint make_fixed_point(double xi, double theta, const EffectiveCoefficients& k) {
    FixedPoint f{xi, theta, Stability::degenerate, 0.0};
    const double det = determinant({xi, theta}, k);
    const double w = flow_rate_scale(k);
    f.exponent = std::sqrt(std::abs(det));
    if (std::abs(det) > 1e-12 * w * w) f.stability = det > 0.0 ? Stability::center : Stability::saddle;
    return f;
}

// Brackets and refines all sign changes of fn on a uniform grid of (lo, hi).
template <class F>
std::vector<double> bracketed_roots(F fn, double lo, double hi, int n, std::vector<std::string>& failures) {
    std::vector<double> roots;
    double xa = lo, fa = fn(lo);
    for (int i = 1; i <= n; ++i) {
        const double xb = lo + (hi - lo) * i / n;
        const double fb = fn(xb);
        if (fa == 0.0) {
            roots.push_back(xa);
        } else if (fa * fb < 0.0) {
            std::uintmax_t iters = 200;
            try {
                auto [r0, r1] = boost::math::tools::toms748_solve(fn, xa, xb, fa, fb,
                                                                  boost::math::tools::eps_tolerance<double>(50), iters);
                roots.push_back(0.5 * (r0 + r1));
            } catch (const std::exception& e) {
                std::ostringstream os;
                os << "bracket [" << xa << ", " << xb << "]: " << e.what();
                failures.push_back(os.str());
            }
        }
        xa = xb;
        fa = fb;
    }
    return roots;
}

double wrap_angle(double x) { return std::remainder(x, two_pi); }

}  // namespace

std::string to_string(ModeLabel l) {
    switch (l) {
        case ModeLabel::JO: return "JO";
        case ModeLabel::ST: return "ST";
        case ModeLabel::STO: return "STO";
        case ModeLabel::OTT: return "OTT";
        case ModeLabel::ON_INVARIANT_LINE: return "ON_INVARIANT_LINE";
        case ModeLabel::UNRESOLVED: return "UNRESOLVED";
    }
    return "UNRESOLVED";
}

std::string to_string(Stability s) {
    switch (s) {
        case Stability::center: return "center";
        case Stability::saddle: return "saddle";
        case Stability::degenerate: return "degenerate";
    }
    return "degenerate";
}

ModeLabel label_for(int winding, bool xi_sign_fixed) {
    if (winding == 0) return xi_sign_fixed ? ModeLabel::STO : ModeLabel::JO;
    if (winding == 1 || winding == -1) return xi_sign_fixed ? ModeLabel::ST : ModeLabel::OTT;
    throw InconclusiveError("winding " + std::to_string(winding) + " outside the mode table");
}

std::optional<double> invariant_line(const EffectiveCoefficients& k) {
    if (k.Tminus == 0.0) return std::nullopt;
    return -k.Tplus / k.Tminus;
}

FixedPointReport find_fixed_points(const EffectiveCoefficients& k) {
    FixedPointReport rep;
    const double a = linear_coefficient(k), b = stiffness_coefficient(k);
    if (k.Tplus == 0.0 && k.Tminus == 0.0) {
        rep.degenerate_family = true;
        if (b != 0.0 && std::abs(a / (2.0 * b)) < 1.0) rep.family_xi = -a / (2.0 * b);
        return rep;
    }

    const double edge = 1.0 - 1e-9;
    for (double theta : {0.0, std::numbers::pi}) {
        auto fn = [&](double xi) { return vector_field({xi, theta}, k).dtheta; };
        for (double xi : bracketed_roots(fn, -edge, edge, 4000, rep.failures))
            rep.points.push_back(make_fixed_point(xi, theta, k));
    }

    if (auto line = invariant_line(k); line && std::abs(*line) < 1.0) {
        const double xl = *line;
        const double slope = 2.0 * k.N * k.Tminus * std::sqrt(1.0 - xl * xl);
        const double c = -(a + 2.0 * b * xl) / slope;
        if (std::abs(c) <= 1.0) {
            const double th = std::acos(c);
            for (double theta : {th, -th}) {
                const bool dup = std::any_of(rep.points.begin(), rep.points.end(), [&](const FixedPoint& p) {
                    return std::abs(p.xi - xl) < 1e-9 && std::abs(wrap_angle(p.theta - theta)) < 1e-9;
                });
                if (!dup) rep.points.push_back(make_fixed_point(xl, theta, k));
            }
        }
    }
    return rep;
}

double characteristic_period(const EffectiveCoefficients& k) {
    double period = 0.0;
    if (!(k.Tplus == 0.0 && k.Tminus == 0.0)) {
        for (const auto& p : find_fixed_points(k).points)
            if (p.stability == Stability::center && p.exponent > 0.0) period = std::max(period, two_pi / p.exponent);
    }
    if (period > 0.0) return period;
    const double w = flow_rate_scale(k);
    return w > 0.0 ? two_pi / w : 1.0;
}

SeparatrixSet separatrix(const EffectiveCoefficients& k, const SeparatrixOptions& opts) {
    if (k.Tminus == 0.0) throw ConfigError("separatrix: requires Tminus != 0");
    if (opts.samples < 3) throw ConfigError("separatrix: need at least 3 samples");
    const double xl = -k.Tplus / k.Tminus;
    const double a = linear_coefficient(k), b = stiffness_coefficient(k);

    SeparatrixSet set;
    if (std::abs(xl) <= 1.0) set.line_xi = xl;
    set.level = a * xl + b * xl * xl;

    // Second branch: a + b (xi + xi_L) + 2 N T- sqrt(1 - xi^2) cos(theta) = 0.
    auto cos_rhs = [&](double xi) {
        return -(a + b * (xi + xl)) / (2.0 * k.N * k.Tminus * std::sqrt(1.0 - xi * xi));
    };
    const int n = opts.samples;
    const double edge = 1.0 - 1e-9;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = -edge + 2.0 * edge * i / (n - 1);

    // Position where |cos_rhs| crosses 1 between a valid and an invalid node.
    auto tip = [&](double inside, double outside) {
        const double target = cos_rhs(inside) > 0.0 ? 1.0 : -1.0;
        auto fn = [&](double xi) { return cos_rhs(xi) - target; };
        std::uintmax_t iters = 200;
        auto [r0, r1] = boost::math::tools::bisect(fn, std::min(inside, outside), std::max(inside, outside),
                                                   boost::math::tools::eps_tolerance<double>(50), iters);
        return std::pair{0.5 * (r0 + r1), target};
    };

    int i = 0;
    while (i < n) {
        if (std::abs(cos_rhs(xs[i])) > 1.0) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < n && std::abs(cos_rhs(xs[j + 1])) <= 1.0) ++j;
        std::vector<MeanFieldState> upper, lower;
        if (i > 0) {
            auto [x, c] = tip(xs[i], xs[i - 1]);
            upper.push_back({x, std::acos(c)});
        }
        for (int m = i; m <= j; ++m) {
            const double th = std::acos(std::clamp(cos_rhs(xs[m]), -1.0, 1.0));
            upper.push_back({xs[m], th});
            lower.push_back({xs[m], -th});
        }
        if (j + 1 < n) {
            auto [x, c] = tip(xs[j], xs[j + 1]);
            upper.push_back({x, std::acos(c)});
        }
        // Closed polyline: upper half forward, lower half back.
        std::vector<MeanFieldState> poly = upper;
        poly.insert(poly.end(), lower.rbegin(), lower.rend());
        if (i > 0) poly.push_back(upper.front());
        set.branches.push_back(std::move(poly));
        i = j + 1;
    }

    if (set.line_xi && std::abs(xl) < 1.0) {
        const double c = -(a + 2.0 * b * xl) / (2.0 * k.N * k.Tminus * std::sqrt(1.0 - xl * xl));
        if (std::abs(c) <= 1.0) {
            const double th = std::acos(c);
            set.saddles.push_back(make_fixed_point(xl, th, k));
            if (th != 0.0 && th != std::numbers::pi) set.saddles.push_back(make_fixed_point(xl, -th, k));
        }
    }
    return set;
}

WindingResult winding_number(const Trajectory& traj, const EffectiveCoefficients& k, double exclusion_radius) {
    if (traj.samples.size() < 2) throw InconclusiveError("winding: trajectory has fewer than two samples");
    if (exclusion_radius < 0.0) exclusion_radius = 1e-9 * k.N * std::max(std::abs(k.Tplus), std::abs(k.Tminus));
    double total = 0.0;
    double px = 0.0, py = 0.0;
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const auto& s = traj.samples[i].state;
        const double d = pendulum_length(s.xi, k);
        if (std::abs(d) <= exclusion_radius)
            throw InconclusiveError("winding: pendulum vector enters the origin exclusion radius; refine near the separatrix");
        const double x = d * std::sin(s.theta), y = d * std::cos(s.theta);
        if (i > 0) {
            const double step = std::atan2(px * y - py * x, px * x + py * y);
            if (std::abs(step) > std::numbers::pi / 2.0)
                throw InconclusiveError("winding: trajectory is undersampled for angle tracking");
            total += step;
        }
        px = x;
        py = y;
    }
    const double turns = total / two_pi;
    const double w = std::round(turns);
    return {static_cast<int>(w), turns - w};
}

std::optional<double> detect_period(const MeanFieldState& s0, const EffectiveCoefficients& k, const PeriodOptions& opts) {
    const auto v0 = vector_field(s0, k);
    if (v0.dxi == 0.0 && v0.dtheta == 0.0) return std::nullopt;
    const double cap = opts.cap > 0.0 ? opts.cap : opts.cap_factor * characteristic_period(k);

    const bool theta_section = std::abs(v0.dtheta) / two_pi >= std::abs(v0.dxi) / 2.0;
    const double dir = theta_section ? (v0.dtheta > 0.0 ? 1.0 : -1.0) : (v0.dxi > 0.0 ? 1.0 : -1.0);
    // Section coordinate: increases by one per crossing of the section in the start direction.
    auto coord = [&](const std::array<double, 2>& y) {
        return theta_section ? dir * (y[1] - s0.theta) / two_pi : dir * (y[0] - s0.xi);
    };

    std::optional<double> period;
    auto observer = [&](const StepView& v) {
        const double ua = coord(v.y0()), ub = coord(v.y1());
        if (!(ub > ua)) return false;
        const double first = std::floor(ua) + 1.0;
        for (double m = first; m <= ub; m += 1.0) {
            if (!theta_section && m != 0.0) continue;
            auto fn = [&](double t) { return coord(v.at(t)) - m; };
            std::uintmax_t iters = 200;
            const double fa = ua - m, fb = ub - m;
            double tc = v.t1();
            if (fb != 0.0) {
                auto [r0, r1] = boost::math::tools::toms748_solve(fn, v.t0(), v.t1(), fa, fb,
                                                                  boost::math::tools::eps_tolerance<double>(52), iters);
                tc = 0.5 * (r0 + r1);
            }
            if (!(tc > 0.0)) continue;
            const auto y = v.at(tc);
            const double miss = theta_section ? std::abs(y[0] - s0.xi) : std::abs(wrap_angle(y[1] - s0.theta));
            if (miss <= opts.section_tolerance) {
                period = tc;
                return true;
            }
        }
        return false;
    };

    IntegrateOptions io;
    io.tolerance = opts.tolerance;
    io.sample_dt = cap;
    try {
        integrate(s0, k, cap, io, observer);
    } catch (const StiffnessError&) {
        return std::nullopt;
    }
    return period;
}

Trajectory one_period(const MeanFieldState& s0, const EffectiveCoefficients& k, double period, double tolerance,
                      int substeps) {
    Trajectory out;
    out.tolerance = tolerance;
    out.samples.push_back({0.0, s0, hc_energy(s0, k), pendulum_length(s0.xi, k)});
    auto observer = [&](const StepView& v) {
        for (int m = 1; m <= substeps; ++m) {
            const double t = m == substeps ? v.t1() : v.t0() + (v.t1() - v.t0()) * m / substeps;
            const auto y = m == substeps ? v.y1() : v.at(t);
            const MeanFieldState s{y[0], y[1]};
            out.samples.push_back({t, s, hc_energy(s, k), pendulum_length(s.xi, k)});
        }
        return false;
    };
    IntegrateOptions io;
    io.tolerance = tolerance;
    io.sample_dt = period;
    const auto t = integrate(s0, k, period, io, observer);
    out.termination = t.termination;
    out.accepted_steps = t.accepted_steps;
    out.rejected_steps = t.rejected_steps;
    return out;
}

ModeClassification classify(const MeanFieldState& s0, const EffectiveCoefficients& k, const PeriodOptions& opts) {
    if (!(std::abs(s0.xi) < 1.0)) throw DomainError("classify: initial xi must be interior");
    ModeClassification mc;
    mc.period = std::numeric_limits<double>::quiet_NaN();

    const auto line = invariant_line(k);
    if (line && std::abs(s0.xi - *line) <= 1e-12) {
        mc.label = ModeLabel::ON_INVARIANT_LINE;
        mc.xi_sign_fixed = s0.xi != 0.0;
        if (auto p = detect_period(s0, k, opts)) mc.period = *p;
        mc.diagnostics = "start lies on the invariant line";
        return mc;
    }

    const auto v0 = vector_field(s0, k);
    const double scale = flow_rate_scale(k);
    if (std::hypot(v0.dxi, v0.dtheta) <= 1e-9 * scale) {
        mc.diagnostics = "start is a fixed point";
        return mc;
    }

    const auto period = detect_period(s0, k, opts);
    if (!period) {
        mc.diagnostics = "no recurrence within the period cap";
        return mc;
    }
    mc.period = *period;

    try {
        const Trajectory traj = one_period(s0, k, *period, opts.tolerance);
        if (traj.termination == Termination::pole_approach) {
            mc.diagnostics = "trajectory reached the pole guard band";
            return mc;
        }
        const auto w = winding_number(traj, k);
        double lo = s0.xi, hi = s0.xi;
        for (const auto& s : traj.samples) {
            lo = std::min(lo, s.state.xi);
            hi = std::max(hi, s.state.xi);
        }
        mc.winding = w.winding;
        mc.winding_residual = w.residual;
        mc.xi_sign_fixed = lo > 0.0 || hi < 0.0;
        mc.label = label_for(mc.winding, mc.xi_sign_fixed);
    } catch (const InconclusiveError& e) {
        mc.label = ModeLabel::UNRESOLVED;
        mc.diagnostics = e.what();
    }
    return mc;
}

}  // namespace polariton
