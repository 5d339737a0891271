#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "polariton/coefficients.hpp"
#include "polariton/tridiagonal.hpp"

namespace polariton {

// Effective two-mode Hamiltonian on the basis |i, N - i>, i = 0..N (i = occupation of mode 1).
struct TwoModeFockHamiltonian {
    int n = 0;
    std::vector<double> diag;
    std::vector<double> offdiag;

    SymmetricTridiagonal as_tridiagonal() const { return {diag, offdiag}; }
    Eigen::MatrixXd dense() const;
};

TwoModeFockHamiltonian build_hamiltonian(const EffectiveCoefficients& k, int n);

// Linear tunneling written with the explicit (N - 1) prefactor, or with the
// number operator n1 + n2 between the ladder operators.
enum class TunnelingForm { fixed_number, operator_form };

inline constexpr int dense_oracle_cap = 8;

// Matrix assembled from raw ladder-operator action on the fixed-N Fock sector.
Eigen::MatrixXd dense_oracle(const EffectiveCoefficients& k, int n, TunnelingForm form = TunnelingForm::fixed_number);

struct QuantumGroundState {
    double energy = 0.0;
    std::vector<double> amplitudes;
    double entropy = 0.0;
    double mean_xi = 0.0;
    double residual = 0.0;
    // Further eigenpairs degenerate with the ground state (within 1e-10 |U|).
    std::vector<QuantumGroundState> degenerate_partners;
};

double entropy(const std::vector<double>& amplitudes);
double mean_xi(const std::vector<double>& amplitudes);

QuantumGroundState ground_state_ed(const TwoModeFockHamiltonian& h, double degeneracy_scale = 1.0);

struct SweepRow {
    double tminus = 0.0;
    double e_g = 0.0;
    double entropy = 0.0;
    double mean_xi = 0.0;
    std::vector<double> amplitudes;  // kept only when requested
};

struct JumpReport {
    bool found = false;
    int interval = -1;  // jump between rows interval and interval + 1
    double max_delta_s = 0.0;
    double median_delta_s = 0.0;
    double neighbour_delta_s = 0.0;  // largest |dS| of the adjacent intervals
};

struct SweepTable {
    std::vector<SweepRow> rows;
    std::vector<double> delta_s;  // |S(k+1) - S(k)|
    JumpReport jump;
    std::optional<double> kink_tminus;  // largest change of dE_g/dT-
};

struct SweepOptions {
    double jump_factor = 10.0;
    bool keep_amplitudes = false;
    int workers = 1;
};

// samples must be sorted ascending.
SweepTable sweep_tminus(const EffectiveCoefficients& templ, int n, const std::vector<double>& samples,
                        const SweepOptions& opts = {});

// Jump test on a sequence of entropies: the largest step must exceed
// factor x median step and factor x the larger adjacent step.
JumpReport detect_jump(const std::vector<double>& entropy, double factor);

}  // namespace polariton
