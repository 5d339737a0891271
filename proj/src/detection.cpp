#include "polariton/detection.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "polariton/errors.hpp"

namespace polariton {

namespace {

constexpr double pi = std::numbers::pi;

double wrap(double x) {
    double r = std::remainder(x, 2.0 * pi);
    if (r <= -pi) r += 2.0 * pi;
    return r;
}

// p = cos^2(zeta - Gt) - sin(2 zeta) sin(2 Gt) (1 - sin eta) / 2
double level2_probability(const CondensateReadoutState& s, double gt) {
    const double c = std::cos(s.zeta - gt);
    return c * c - 0.5 * std::sin(2.0 * s.zeta) * std::sin(2.0 * gt) * (1.0 - std::sin(s.eta));
}

CountEvaluation evaluate(int n, double p) {
    CountEvaluation e;
    e.p = p;
    e.probability_valid = p >= 0.0 && p <= 1.0;
    e.binomial_sum = binomial_mean(n, p);
    e.closed_form = n * p;
    if (e.probability_valid) {
        const double scale = std::max(std::abs(e.closed_form), 1e-300);
        const double tol = n > 60 ? 1e-9 : 1e-12;
        if (std::abs(e.binomial_sum - e.closed_form) > tol * scale + 1e-14)
            throw std::logic_error("binomial sum disagrees with its closed form");
    }
    return e;
}

}  // namespace

void CondensateReadoutState::validate() const {
    if (n < 0) throw ConfigError("detect: n must be non-negative");
    if (!(zeta >= 0.0 && zeta <= pi / 2.0)) throw ConfigError("detect: zeta must lie in [0, pi/2]");
    if (!(eta > -pi && eta <= pi)) throw ConfigError("detect: eta must lie in (-pi, pi]");
}

double binomial_mean(int n, double p) {
    if (n < 0) throw ConfigError("binomial_mean: n must be non-negative");
    const double q = 1.0 - p;
    double sum = 0.0;
    const bool log_domain = n > 60 && p > 0.0 && q > 0.0;
    for (int i = 0; i <= n; ++i) {
        const int k = n - i;
        if (k == 0) continue;
        if (log_domain) {
            const double lc = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(k + 1.0);
            sum += k * std::exp(lc + k * std::log(p) + i * std::log(q));
        } else {
            // Exact binomial coefficient by the multiplicative formula.
            double c = 1.0;
            for (int j = 1; j <= i; ++j) c = c * (n - i + j) / j;
            sum += k * c * std::pow(p, k) * std::pow(q, i);
        }
    }
    return sum;
}

CountEvaluation expected_n1(const CondensateReadoutState& s) {
    s.validate();
    const double c = std::cos(s.zeta);
    return evaluate(s.n, c * c);
}

CountEvaluation interference_signal(const CondensateReadoutState& s, double gamma_t) {
    s.validate();
    return evaluate(s.n, level2_probability(s, gamma_t));
}

double rotation_oracle(const CondensateReadoutState& s, double gamma_t, PhaseConvention convention) {
    s.validate();
    // Heisenberg picture of the beam splitter: b1^dag -> cos(Gt) b1^dag -+ i sin(Gt) b2^dag.
    const std::complex<double> i(0.0, convention == PhaseConvention::standard ? 1.0 : -1.0);
    const std::complex<double> amp =
        std::cos(gamma_t) * std::cos(s.zeta) - i * std::polar(1.0, s.eta) * std::sin(gamma_t) * std::sin(s.zeta);
    return s.n * std::norm(amp);
}

std::vector<SignalSample> generate_signal(const CondensateReadoutState& s, std::span<const double> gamma_ts,
                                          double noise_sigma, std::uint64_t seed, PhaseConvention convention) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);
    std::vector<SignalSample> out;
    out.reserve(gamma_ts.size());
    for (double gt : gamma_ts) {
        double v = rotation_oracle(s, gt, convention);
        if (noise_sigma > 0.0) v += noise(rng);
        out.push_back({gt, v});
    }
    return out;
}

EtaEstimate infer_eta(std::span<const SignalSample> samples, double zeta, int n, PhaseConvention convention) {
    if (n <= 0) throw IdentifiabilityError("infer_eta: n must be positive for the signal to carry phase information");
    // signal = base + slope * sin(eta), with base = n (cos^2 zeta cos^2 Gt + sin^2 zeta sin^2 Gt)
    const double sign = convention == PhaseConvention::standard ? 1.0 : -1.0;
    auto slope = [&](double gt) { return sign * 0.5 * n * std::sin(2.0 * zeta) * std::sin(2.0 * gt); };
    auto base = [&](double gt) {
        const double a = std::cos(zeta) * std::cos(gt), b = std::sin(zeta) * std::sin(gt);
        return n * (a * a + b * b);
    };
    double sbb = 0.0, sby = 0.0;
    int usable = 0;
    for (const auto& x : samples) {
        const double b = slope(x.gamma_t);
        if (std::abs(b) > 1e-12 * n) ++usable;
        sbb += b * b;
        sby += b * (x.count - base(x.gamma_t));
    }
    if (usable == 0)
        throw IdentifiabilityError(
            "infer_eta: sin(2 zeta) sin(2 Gamma t) vanishes at every sample, so the signal does not depend on eta");
    if (usable < 2)
        throw IdentifiabilityError("infer_eta: need at least two samples with sin(2 zeta) sin(2 Gamma t) != 0");

    EtaEstimate e;
    e.usable_samples = usable;
    e.sin_eta = sby / sbb;
    double clipped = e.sin_eta;
    if (clipped > 1.0 || clipped < -1.0) {
        e.clipped = true;
        clipped = std::clamp(clipped, -1.0, 1.0);
    }
    double rss = 0.0;
    for (const auto& x : samples) {
        const double r = x.count - base(x.gamma_t) - slope(x.gamma_t) * e.sin_eta;
        rss += r * r;
    }
    e.residual_rms = std::sqrt(rss / static_cast<double>(samples.size()));
    const double a = std::asin(clipped);
    e.candidates.push_back(wrap(a));
    const double b = wrap(pi - a);
    if (std::abs(wrap(b - a)) > 1e-12) e.candidates.push_back(b);
    return e;
}

}  // namespace polariton
