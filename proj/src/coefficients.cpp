#include "polariton/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "polariton/errors.hpp"

namespace polariton {

namespace {

bool finite_all(std::initializer_list<double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

// |lhs| / |rhs| with 0/0 = 0 and x/0 = inf.
double safe_ratio(double lhs, double rhs) {
    lhs = std::abs(lhs);
    rhs = std::abs(rhs);
    if (lhs == 0.0) return 0.0;
    if (rhs == 0.0) return std::numeric_limits<double>::infinity();
    return lhs / rhs;
}

// Sign convention: the entry of largest magnitude is positive.
template <class V>
void fix_sign(V&& v) {
    Eigen::Index k = 0;
    v.cwiseAbs().maxCoeff(&k);
    if (v(k) < 0) v = -v;
}

struct MicrowaveWeights {
    double w_nu2;    // Omega_nu2^2 / omega_nu^2
    double w_nu1;    // Omega_nu1^2 / omega_nu^2
    double product;  // Omega_nu1 Omega_nu2 / omega_nu^2
};

MicrowaveWeights microwave_weights(const MicroscopicParams& p) {
    const double wn2 = p.omega_nu1 * p.omega_nu1 + p.omega_nu2 * p.omega_nu2;
    // With both microwave couplings off, gamma_+- vanish and every weighted sum
    // collapses to 1/x, so any split summing to one gives the limit.
    if (wn2 == 0.0) return {0.5, 0.5, 0.0};
    return {p.omega_nu2 * p.omega_nu2 / wn2, p.omega_nu1 * p.omega_nu1 / wn2, p.omega_nu1 * p.omega_nu2 / wn2};
}

}  // namespace

void MicroscopicParams::validate() const {
    if (!finite_all({g, omega, epsilon, delta, delta5, delta6, g25, g36, omega_nu1, omega_nu2, mw_detuning,
                     delta_prime}))
        throw ConfigError("microscopic: all parameters must be finite");
    if (!(g > 0.0)) throw ConfigError("microscopic: g must be positive");
    if (omega < 0.0) throw ConfigError("microscopic: Omega must be non-negative");
}

double MicroscopicParams::max_scale() const {
    double m = 0.0;
    for (double x : {g, omega, epsilon, delta, delta5, delta6, g25, g36, omega_nu1, omega_nu2, mw_detuning, delta_prime})
        m = std::max(m, std::abs(x));
    return m;
}

void EffectiveCoefficients::validate() const {
    if (!finite_all({V1, V2, U, Tplus, Tminus, N}))
        throw ConfigError("coefficients: V1, V2, U, Tplus, Tminus and N must be finite");
    if (N < 0.0) throw ConfigError("coefficients: N must be non-negative");
}

SingleParticleMatrices single_particle_matrices(const MicroscopicParams& p) {
    // Raman couplings sqrt(2)*Omega enter as half their value.
    const double r = std::sqrt(2.0) * p.omega / 2.0;
    SingleParticleMatrices m;
    m.c1 << p.epsilon, 0.0, r, 0.0,
            0.0, -p.epsilon, r, 0.0,
            r, r, p.delta, p.g,
            0.0, 0.0, p.g, 0.0;
    const double a = p.omega_nu1 / 2.0;
    const double b = p.omega_nu2 / 2.0;
    m.c2 << 0.0, 0.0, a,
            0.0, 0.0, b,
            a, b, p.mw_detuning;
    return m;
}

std::array<Eigen::Vector4d, 2> quasi_dark_modes(const MicroscopicParams& p) {
    const double w = std::hypot(p.g, p.omega);
    const double go = p.g / w;
    const double ca = -p.omega / (std::sqrt(2.0) * w);
    Eigen::Vector4d p1(0.5 * (go + 1.0), 0.5 * (go - 1.0), 0.0, ca);
    Eigen::Vector4d p2(0.5 * (go - 1.0), 0.5 * (go + 1.0), 0.0, ca);
    return {p1, p2};
}

ModeSpectrum diagonalize_spectrum(const MicroscopicParams& p) {
    const auto m = single_particle_matrices(p);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> e1(m.c1);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> e2(m.c2);

    std::array<int, 4> idx{0, 1, 2, 3};
    const auto& ev = e1.eigenvalues();
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return std::abs(ev(a)) < std::abs(ev(b)); });

    const double tol = 1e-9 * std::max(1.0, p.max_scale());
    if (std::abs(ev(idx[2])) - std::abs(ev(idx[1])) <= tol) {
        std::ostringstream os;
        os.precision(12);
        os << "quasi-dark pair is not separated from the bright pair: |" << ev(idx[1]) << "| vs |" << ev(idx[2]) << "|";
        throw AmbiguityError(os.str());
    }
    // lambda1 is the branch that follows +eps*g/omega.
    if ((ev(idx[0]) - ev(idx[1])) * p.epsilon < 0.0) std::swap(idx[0], idx[1]);
    if (ev(idx[2]) < ev(idx[3])) std::swap(idx[2], idx[3]);

    ModeSpectrum s;
    const auto dark = quasi_dark_modes(p);
    for (int k = 0; k < 4; ++k) {
        s.lambda[k] = ev(idx[k]);
        s.eigvecs_c1.col(k) = e1.eigenvectors().col(idx[k]);
        if (k < 2) {
            if (s.eigvecs_c1.col(k).dot(dark[k]) < 0.0) s.eigvecs_c1.col(k) *= -1.0;
        } else {
            fix_sign(s.eigvecs_c1.col(k));
        }
    }

    // C2: gamma_0 is the eigenvalue nearest zero (exactly zero analytically),
    // gamma_+ the largest, gamma_- the smallest of the remaining two.
    std::array<int, 3> jdx{0, 1, 2};
    const auto& gv = e2.eigenvalues();
    std::stable_sort(jdx.begin(), jdx.end(), [&](int a, int b) { return std::abs(gv(a)) < std::abs(gv(b)); });
    if (gv(jdx[1]) < gv(jdx[2])) std::swap(jdx[1], jdx[2]);
    for (int k = 0; k < 3; ++k) {
        s.gamma[k] = gv(jdx[k]);
        s.eigvecs_c2.col(k) = e2.eigenvectors().col(jdx[k]);
        fix_sign(s.eigvecs_c2.col(k));
    }
    // For Delta = 0 the closed forms are exact; use them to remove rounding noise.
    if (p.mw_detuning == 0.0) {
        const double half = std::hypot(p.omega_nu1, p.omega_nu2) / 2.0;
        s.gamma = {0.0, half, -half};
    }
    return s;
}

std::array<double, 4> printed_lambda(const MicroscopicParams& p) {
    const double e = p.epsilon, d = p.delta, W = p.omega, g = p.g;
    const double w2 = W * W + g * g;
    const double w = std::sqrt(w2);
    const double lin = e * g / w + e * e * e * W * W / (2.0 * g * w2 * w);
    const double shift = e * e * d * W * W / (2.0 * w2 * w2);
    const double root = std::sqrt(d * d + 4.0 * w2);
    const double corr_num = e * e * W * W;
    const double corr_den = 2.0 * root * w2 * w2;
    const double l3 = (d + root) / 2.0 + corr_num * (d * d + 2.0 * w2 - d * root) / corr_den;
    const double l4 = (d - root) / 2.0 - corr_num * (d * d + 2.0 * w2 + d * root) / corr_den;
    return {lin + shift, -lin + shift, l3, l4};
}

std::vector<NamedValue> resonance_denominators(const MicroscopicParams& p, const ModeSpectrum& s) {
    const double dp = p.delta_prime;
    const double dl = s.lambda[1] - s.lambda[0];
    const double gp = s.gamma[1], gm = s.gamma[2];
    return {
        {"delta'", dp},
        {"delta'+gamma_plus", dp + gp},
        {"delta'+gamma_minus", dp + gm},
        {"delta'+lambda2-lambda1", dp + dl},
        {"delta'+lambda2-lambda1+gamma_plus", dp + dl + gp},
        {"delta'+lambda2-lambda1+gamma_minus", dp + dl + gm},
        {"delta'+lambda1-lambda2", dp - dl},
        {"delta'+lambda1-lambda2+gamma_plus", dp - dl + gp},
        {"delta'+lambda1-lambda2+gamma_minus", dp - dl + gm},
        {"delta'+2(lambda2-lambda1)", dp + 2.0 * dl},
        {"delta'+2(lambda2-lambda1)+gamma_plus", dp + 2.0 * dl + gp},
        {"delta'+2(lambda2-lambda1)+gamma_minus", dp + 2.0 * dl + gm},
    };
}

EffectiveCoefficients effective_coefficients(const MicroscopicParams& p, double N, const CoefficientOptions& opts) {
    p.validate();
    EffectiveCoefficients k;
    k.N = N;
    if (p.omega == 0.0 || (p.g25 == 0.0 && p.g36 == 0.0)) return k;

    const ModeSpectrum s = diagonalize_spectrum(p);
    const double band = opts.guard_band * p.max_scale();
    for (const auto& d : resonance_denominators(p, s))
        if (std::abs(d.value) <= band) throw NearResonanceError(d.name, d.value, band);

    const double g = p.g, W = p.omega;
    const double w = std::hypot(g, W);
    const double go = g / w;
    const double l1 = s.lambda[0], l2 = s.lambda[1];
    const double gp = s.gamma[1], gm = s.gamma[2];
    const double dp = p.delta_prime;
    const auto mw = microwave_weights(p);

    // w0/x + w1/2 (1/(x+gamma_+) + 1/(x+gamma_-))
    auto sum = [&](double x, double w0, double w1) { return w0 / x + 0.5 * w1 / (x + gp) + 0.5 * w1 / (x + gm); };
    auto bracket = [&](double x) { return 0.5 / (x + gp) + 0.5 / (x + gm) - 1.0 / x; };

    const double g25s = p.g25 * p.g25, g36s = p.g36 * p.g36;
    const double pre_v = -W * W / (4.0 * w * w);
    k.V1 = pre_v * (g25s * (go + 1.0) * (go + 1.0) * sum(dp + 2.0 * (l2 - l1), mw.w_nu2, mw.w_nu1) +
                    g36s * (go - 1.0) * (go - 1.0) * sum(dp + l2 - l1, mw.w_nu1, mw.w_nu2));
    k.V2 = pre_v * (g25s * (go - 1.0) * (go - 1.0) * sum(dp, mw.w_nu2, mw.w_nu1) +
                    g36s * (go + 1.0) * (go + 1.0) * sum(dp + l1 - l2, mw.w_nu1, mw.w_nu2));
    k.U = -g * g * W * W / (2.0 * w * w * w * w) *
          (g25s * sum(dp + l2 - l1, mw.w_nu2, mw.w_nu1) + g36s * sum(dp, mw.w_nu1, mw.w_nu2));
    const double pre_t = -g * p.g25 * p.g36 * W * W * mw.product / (8.0 * w * w * w) * (go - 1.0);
    const double b_shift = bracket(dp + l2 - l1);
    const double b_zero = bracket(dp);
    k.Tplus = pre_t * (b_shift + b_zero);
    k.Tminus = pre_t * (b_shift - b_zero);
    return k;
}

MicroscopicParams with_resonant_detunings(const MicroscopicParams& p) {
    const ModeSpectrum s = diagonalize_spectrum(p);
    MicroscopicParams q = p;
    q.delta5 = p.delta_prime - p.epsilon + 2.0 * s.lambda[1];
    q.delta6 = p.delta_prime + p.epsilon + s.lambda[0] + s.lambda[1];
    return q;
}

RegimeReport validate_regime(const MicroscopicParams& p, const RegimeOptions& opts) {
    p.validate();
    const ModeSpectrum s = diagonalize_spectrum(p);
    const double l1 = s.lambda[0], l2 = s.lambda[1], l3 = s.lambda[2], l4 = s.lambda[3];
    const double gp = s.gamma[1], gm = s.gamma[2];
    const double e = p.epsilon;
    const double dl = l2 - l1;

    const std::vector<NamedValue> middle = {
        {"|Delta5+eps|", std::abs(p.delta5 + e)},
        {"|Delta5-eps|", std::abs(p.delta5 - e)},
        {"|Delta6+eps|", std::abs(p.delta6 + e)},
        {"|Delta6-eps|", std::abs(p.delta6 - e)},
        {"|gamma_plus|", std::abs(gp)},
        {"|gamma_minus|", std::abs(gm)},
        {"|lambda1|", std::abs(l1)},
        {"|lambda2|", std::abs(l2)},
        {"|lambda1-lambda2|", std::abs(dl)},
        {"|gamma_plus+(lambda2-lambda1)|", std::abs(gp + dl)},
        {"|gamma_plus-(lambda2-lambda1)|", std::abs(gp - dl)},
        {"|gamma_minus+(lambda2-lambda1)|", std::abs(gm + dl)},
        {"|gamma_minus-(lambda2-lambda1)|", std::abs(gm - dl)},
        {"|gamma_plus+2(lambda2-lambda1)|", std::abs(gp + 2.0 * dl)},
        {"|gamma_plus-2(lambda2-lambda1)|", std::abs(gp - 2.0 * dl)},
        {"|gamma_minus+2(lambda2-lambda1)|", std::abs(gm + 2.0 * dl)},
        {"|gamma_minus-2(lambda2-lambda1)|", std::abs(gm - 2.0 * dl)},
    };
    const double gmax = std::max(std::abs(p.g25), std::abs(p.g36));
    const double big = std::min({std::abs(l3), std::abs(l4), std::abs(l3 + l4)});

    RegimeReport r;
    auto add = [&](std::string group, std::string lhs, double lv, std::string rhs, double rv) {
        InequalityRecord rec{std::move(group), std::move(lhs), std::move(rhs), lv, rv, safe_ratio(lv, rv), false};
        rec.pass = rec.ratio <= opts.much_less;
        r.records.push_back(rec);
        return rec.ratio;
    };

    for (const auto& m : middle)
        r.coupling_ratio = std::max(r.coupling_ratio, add("coupling", "max|g_m|", gmax, m.name, m.value));
    for (const auto& m : middle)
        r.separation_ratio =
            std::max(r.separation_ratio, add("separation", m.name, m.value, "min(|lambda3|,|lambda4|,|lambda3+lambda4|)", big));

    double den_min = std::numeric_limits<double>::infinity();
    std::string den_name;
    for (const auto& d : resonance_denominators(p, s))
        if (std::abs(d.value) < den_min) {
            den_min = std::abs(d.value);
            den_name = d.name;
        }
    r.denominator_ratio = add("denominator", "max|g_m|", gmax, "|" + den_name + "|", den_min);

    add("epsilon", "|eps|", e, "Omega", p.omega);
    add("epsilon", "|eps|", e, "|delta|", p.delta);
    add("epsilon", "|eps|", e, "sqrt(2)*Omega", std::sqrt(2.0) * p.omega);

    const double tol = opts.resonance_tolerance * std::max(1.0, p.max_scale());
    r.residual_delta6 = p.delta6 - e - (l1 + l2) - p.delta_prime;
    r.residual_delta5 = p.delta5 + e - 2.0 * l2 - p.delta_prime;
    r.resonance_ok = std::abs(r.residual_delta6) <= tol && std::abs(r.residual_delta5) <= tol;
    for (auto [name, value] : {std::pair{"Delta6-eps-(lambda1+lambda2)-delta'", r.residual_delta6},
                               std::pair{"Delta5+eps-2lambda2-delta'", r.residual_delta5},
                               std::pair{"|Delta| (microwave detuning)", p.mw_detuning}}) {
        InequalityRecord rec{"resonance", name, "tolerance", std::abs(value), tol, safe_ratio(value, tol), false};
        rec.pass = std::abs(value) <= tol;
        if (rec.lhs.front() == '|') rec.group = "simplification";
        r.records.push_back(rec);
    }

    r.pass = std::all_of(r.records.begin(), r.records.end(), [](const InequalityRecord& x) { return x.pass; });
    return r;
}

}  // namespace polariton
