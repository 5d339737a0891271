#pragma once

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "polariton/coefficients.hpp"

namespace polariton {

inline constexpr int mode_count = 7;
// Mode order of every occupation tuple.
inline constexpr std::array<const char*, mode_count> mode_names = {"S12", "S13", "S14", "S15", "S16", "S17", "a"};

using Occupation = std::array<int, mode_count>;

// All seven-mode occupations with total quanta <= cutoff, ordered by total then lexicographically.
class MultiModeBasis {
public:
    explicit MultiModeBasis(int cutoff);

    int cutoff() const { return cutoff_; }
    std::size_t size() const { return states_.size(); }
    const Occupation& state(std::size_t i) const { return states_[i]; }
    std::optional<std::size_t> index(const Occupation& o) const;

private:
    int cutoff_;
    std::vector<Occupation> states_;
    std::map<Occupation, std::size_t> index_;
};

// Static quadratic part plus the two time-dependent channels. raise25 holds
// g25 S12^dag S15 a^dag (its transpose is the conjugate term), likewise raise36.
struct RotatingHamiltonian {
    Eigen::SparseMatrix<double> h_static;
    Eigen::SparseMatrix<double> raise25;
    Eigen::SparseMatrix<double> raise36;
    double freq25 = 0.0;  // Delta5 + eps
    double freq36 = 0.0;  // Delta6 - eps

    Eigen::MatrixXcd at(double t) const;
};

RotatingHamiltonian rotating_hamiltonian(const MicroscopicParams& p, const MultiModeBasis& basis);

Eigen::MatrixXcd h_rot(const MicroscopicParams& p, double t, const MultiModeBasis& basis);

struct MultiModeState {
    Eigen::VectorXcd amplitudes;
    double t = 0.0;
};

// Normalized (P1^dag)^n1 (P2^dag)^n2 |vac> from the closed-form quasi-dark vectors.
MultiModeState polariton_state(const MicroscopicParams& p, int n1, int n2, const MultiModeBasis& basis);

struct EvolveOptions {
    double dt = 0.0;           // 0 derives dt from step_factor
    double step_factor = 1.0;  // dt = step_factor / (fastest frequency in the sector)
    int samples = 401;         // output points including t = 0
    bool prune = true;         // restrict to the sector reachable from psi0
    double norm_budget = 1e-8;
};

struct FidelitySeries {
    std::vector<double> t;
    std::vector<double> fidelity;
    std::vector<double> norm_drift;  // | ||psi(t)|| - 1 |
    std::vector<double> leakage;     // probability on states at the cutoff boundary
    double dt = 0.0;
    long steps = 0;
    std::size_t sector_size = 0;
    double max_norm_drift = 0.0;
    double max_leakage = 0.0;
};

// Fixed-step RK4 for i d(psi)/dt = H(t) psi. The static quadratic part is
// diagonalized exactly on the sector and removed by the interaction picture;
// RK4 then integrates the slow time-dependent coupling, evaluated at every stage.
FidelitySeries evolve_full(const MultiModeState& psi0, const MicroscopicParams& p, const MultiModeBasis& basis,
                           double t_end, const EvolveOptions& opts = {});

// Exact two-mode evolution through the eigendecomposition of the effective Hamiltonian.
std::vector<double> evolve_effective(const EffectiveCoefficients& k, const Eigen::VectorXcd& psi0,
                                     const std::vector<double>& times);

// Fock state |n1, n2> of the two effective modes.
Eigen::VectorXcd two_mode_fock(int n1, int n2);

struct CompareOptions {
    int cutoff = 0;       // 0 means n1 + n2 + 2
    double t_end = 0.0;   // 0 derives a window from the effective coefficients
    double step_factor = 1.0;
    int samples = 401;
    double tolerance = 0.05;
    bool check_cutoff = true;
    bool check_dt = true;
    RegimeOptions regime;
    int workers = 1;
};

struct OccupationComparison {
    int n1 = 0;
    int n2 = 0;
    FidelitySeries full;
    std::vector<double> f_eff;
    std::vector<double> deviation;
    double sup_deviation = 0.0;
    std::optional<double> cutoff_change;  // sup |F(cutoff) - F(cutoff + 1)|
    std::optional<double> dt_change;      // sup |F(dt) - F(dt / 2)|
};

struct CompareReport {
    EffectiveCoefficients coefficients;
    RegimeReport regime;
    bool out_of_regime = false;
    double t_end = 0.0;
    int cutoff = 0;
    std::vector<OccupationComparison> runs;
    bool within_tolerance = false;
};

// Default comparison window: a quarter period of the N = 2 tunneling exchange.
double default_window(const EffectiveCoefficients& k);

CompareReport compare(const MicroscopicParams& p, const std::vector<std::pair<int, int>>& occupations,
                      const CompareOptions& opts = {});

}  // namespace polariton
