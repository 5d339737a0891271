#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "polariton/classify.hpp"
#include "polariton/coefficients.hpp"
#include "polariton/detection.hpp"
#include "polariton/fullmodel.hpp"
#include "polariton/meanfield.hpp"

namespace polariton {

inline constexpr const char* engine_version = "0.1.0";
inline constexpr int config_schema_version = 1;

struct EvolveSection {
    MeanFieldState initial{0.5, 0.0};
    double t_end = 0.0;  // 0 means 50 characteristic periods
    IntegrateOptions integrator;
};

struct LatticeSpec {
    double xi_min = -0.95;
    double xi_max = 0.95;
    int n_xi = 20;
    int n_theta = 20;
};

struct ClassifySection {
    std::vector<MeanFieldState> initial;
    std::optional<LatticeSpec> lattice;
    PeriodOptions period;
    bool separatrix = true;
};

struct SweepSection {
    double tminus_min = -0.2;
    double tminus_max = 0.0;
    int points = 200;
    int n = 0;  // ED particle number; 0 takes N from the coefficients
    double jump_factor = 10.0;
    bool keep_amplitudes = false;
};

struct ValidateSection {
    std::vector<std::pair<int, int>> occupations{{0, 1}, {0, 2}};
    CompareOptions compare;
};

struct DetectSection {
    CondensateReadoutState state{10, 0.7853981633974483, 0.5235987755982988};
    std::vector<double> gamma_t;
    double noise_sigma = 0.0;
    PhaseConvention convention = PhaseConvention::standard;
    std::string input_csv;  // infer from this file instead of generating
};

struct RunConfig {
    std::optional<MicroscopicParams> microscopic;
    std::optional<EffectiveCoefficients> coefficients;
    double N = 2.0;
    CoefficientOptions coefficient_options;
    RegimeOptions regime;
    GridSpec portrait;
    EvolveSection evolve;
    ClassifySection classify;
    SweepSection sweep;
    ValidateSection validate;
    DetectSection detect;
    std::string hash;  // FNV-1a 64 of the canonical JSON, hex

    // Direct coefficients, or the ones derived from the microscopic parameters.
    EffectiveCoefficients resolved_coefficients() const;
    const MicroscopicParams& require_microscopic(const std::string& verb) const;
};

std::uint64_t fnv1a64(const std::string& bytes);

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

}  // namespace polariton
