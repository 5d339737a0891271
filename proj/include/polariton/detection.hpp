#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace polariton {

// n excitations in the two-mode coherent-spin state with mixing angle zeta and relative phase eta.
struct CondensateReadoutState {
    int n = 0;
    double zeta = 0.0;
    double eta = 0.0;

    void validate() const;
};

struct CountEvaluation {
    double binomial_sum = 0.0;
    double closed_form = 0.0;
    double p = 0.0;             // single-excitation probability in level 2
    bool probability_valid = true;  // p in [0, 1]
};

// sum_i (n - i) C(n, i) p^(n-i) q^i with q = 1 - p, evaluated term by term
// (log-domain binomials above n = 60).
double binomial_mean(int n, double p);

CountEvaluation expected_n1(const CondensateReadoutState& s);
CountEvaluation interference_signal(const CondensateReadoutState& s, double gamma_t);

// Sign of i in the mode mixing. `standard` reproduces the closed-form p;
// `conjugate` flips sin(eta).
enum class PhaseConvention { standard, conjugate };

double rotation_oracle(const CondensateReadoutState& s, double gamma_t,
                       PhaseConvention convention = PhaseConvention::standard);

struct SignalSample {
    double gamma_t = 0.0;
    double count = 0.0;
};

std::vector<SignalSample> generate_signal(const CondensateReadoutState& s, std::span<const double> gamma_ts,
                                          double noise_sigma = 0.0, std::uint64_t seed = 0,
                                          PhaseConvention convention = PhaseConvention::standard);

struct EtaEstimate {
    double sin_eta = 0.0;
    bool clipped = false;            // least-squares value fell outside [-1, 1]
    std::vector<double> candidates;  // eta and pi - eta, one entry when they coincide
    double residual_rms = 0.0;
    int usable_samples = 0;
};

// Least-squares fit of sin(eta); the signal depends on eta only through sin(eta).
// `convention` must match the one the data were taken with.
EtaEstimate infer_eta(std::span<const SignalSample> samples, double zeta, int n,
                      PhaseConvention convention = PhaseConvention::standard);

}  // namespace polariton
