#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace polariton {

// Cavity, laser and microwave parameters of the seven-mode model.
// Omega is the Raman drive; the two Raman couplings are both sqrt(2)*Omega.
struct MicroscopicParams {
    double g = 1.0;
    double omega = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    double delta5 = 0.0;
    double delta6 = 0.0;
    double g25 = 0.0;
    double g36 = 0.0;
    double omega_nu1 = 0.0;
    double omega_nu2 = 0.0;
    double mw_detuning = 0.0;  // microwave detuning Delta
    double delta_prime = 0.0;

    // Throws ConfigError on g <= 0, Omega < 0 or non-finite entries.
    void validate() const;
    // Largest input magnitude; sets the scale of relative guard bands.
    double max_scale() const;
};

struct EffectiveCoefficients {
    double V1 = 0.0;
    double V2 = 0.0;
    double U = 0.0;
    double Tplus = 0.0;
    double Tminus = 0.0;
    double N = 1.0;

    void validate() const;
};

struct SingleParticleMatrices {
    Eigen::Matrix4d c1;  // basis (S12, S13, S14, a)
    Eigen::Matrix3d c2;  // basis (S15, S16, S17)
};

SingleParticleMatrices single_particle_matrices(const MicroscopicParams& p);

// lambda[0], lambda[1] are the quasi-dark pair (smallest |lambda|), ordered so
// that lambda1 - lambda2 has the sign of epsilon; lambda[2] >= lambda[3].
// gamma = (gamma_0, gamma_+, gamma_-). Columns of the matrices are eigenvectors.
struct ModeSpectrum {
    std::array<double, 4> lambda{};
    std::array<double, 3> gamma{};
    Eigen::Matrix4d eigvecs_c1;
    Eigen::Matrix3d eigvecs_c2;
};

ModeSpectrum diagonalize_spectrum(const MicroscopicParams& p);

// Perturbative eigenvalue expressions as printed with the model (Delta = 0).
std::array<double, 4> printed_lambda(const MicroscopicParams& p);

// Closed-form quasi-dark vectors P1, P2 over (S12, S13, S14, a).
std::array<Eigen::Vector4d, 2> quasi_dark_modes(const MicroscopicParams& p);

struct NamedValue {
    std::string name;
    double value;
};

// Every denominator that enters the coefficient formulas.
std::vector<NamedValue> resonance_denominators(const MicroscopicParams& p, const ModeSpectrum& s);

struct CoefficientOptions {
    double guard_band = 1e-9;  // relative to MicroscopicParams::max_scale()
};

EffectiveCoefficients effective_coefficients(const MicroscopicParams& p, double N,
                                             const CoefficientOptions& opts = {});

// Returns p with Delta5 and Delta6 set so that the resonance condition holds exactly.
MicroscopicParams with_resonant_detunings(const MicroscopicParams& p);

struct InequalityRecord {
    std::string group;
    std::string lhs;
    std::string rhs;
    double lhs_value = 0.0;
    double rhs_value = 0.0;
    double ratio = 0.0;
    bool pass = false;
};

struct RegimeOptions {
    double much_less = 0.1;
    double resonance_tolerance = 1e-9;  // relative to max_scale()
};

struct RegimeReport {
    std::vector<InequalityRecord> records;
    double coupling_ratio = 0.0;     // max|g_m| / min(middle group)
    double separation_ratio = 0.0;   // max(middle group) / min(|l3|, |l4|, |l3+l4|)
    double denominator_ratio = 0.0;  // max|g_m| / min |denominator|
    double residual_delta6 = 0.0;    // Delta6 - eps - (l1 + l2) - delta'
    double residual_delta5 = 0.0;    // Delta5 + eps - 2 l2 - delta'
    bool resonance_ok = false;
    bool pass = false;
};

RegimeReport validate_regime(const MicroscopicParams& p, const RegimeOptions& opts = {});

}  // namespace polariton
