#include "polariton/config.hpp"

#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>

#include "polariton/errors.hpp"

namespace polariton {

namespace {

using nlohmann::json;

// Reads typed fields from one JSON object and rejects keys nobody asked for.
class Section {
public:
    Section(const json& parent, std::string name) : name_(std::move(name)) {
        if (!parent.contains(name_)) return;
        node_ = &parent.at(name_);
        if (!node_->is_object()) throw ConfigError("section '" + name_ + "' must be an object");
    }
    Section(const json& node, std::string name, bool) : node_(&node), name_(std::move(name)) {
        if (!node_->is_object()) throw ConfigError("section '" + name_ + "' must be an object");
    }

    bool present() const { return node_ != nullptr; }
    const std::string& name() const { return name_; }

    bool has(const std::string& key) const { return node_ && node_->contains(key); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return node_->at(key);
    }

    template <class T>
    T get(const std::string& key, T fallback) {
        if (!has(key)) return fallback;
        return convert<T>(raw(key), key);
    }

    template <class T>
    T require(const std::string& key) {
        if (!has(key)) throw ConfigError("section '" + name_ + "' is missing required key '" + key + "'");
        return convert<T>(raw(key), key);
    }

    std::optional<Section> child(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return Section(raw(key), name_ + "." + key, true);
    }

    void finish() const {
        if (!node_) return;
        for (const auto& [k, v] : node_->items())
            if (!seen_.contains(k)) throw ConfigError("unknown key '" + k + "' in section '" + name_ + "'");
    }

private:
    template <class T>
    T convert(const json& v, const std::string& key) const {
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) throw ConfigError("");
            } else if constexpr (std::is_same_v<T, int>) {
                if (!v.is_number_integer()) throw ConfigError("");
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw ConfigError("");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw ConfigError("");
            }
            return v.get<T>();
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "' in section '" + name_ + "' has the wrong type");
        }
    }

    const json* node_ = nullptr;
    std::string name_;
    std::set<std::string> seen_;
};

MicroscopicParams read_microscopic(Section& s) {
    MicroscopicParams p;
    p.g = s.require<double>("g");
    p.omega = s.require<double>("Omega");
    p.epsilon = s.require<double>("epsilon");
    p.delta = s.require<double>("delta");
    p.g25 = s.require<double>("g25");
    p.g36 = s.require<double>("g36");
    p.omega_nu1 = s.require<double>("Omega_nu1");
    p.omega_nu2 = s.require<double>("Omega_nu2");
    p.mw_detuning = s.get<double>("Delta", 0.0);
    p.delta_prime = s.require<double>("delta_prime");
    const bool resonant = s.get<bool>("resonant_detunings", false);
    if (resonant) {
        if (s.has("Delta5") || s.has("Delta6"))
            throw ConfigError("section 'microscopic': give Delta5/Delta6 or resonant_detunings, not both");
        p.validate();
        p = with_resonant_detunings(p);
    } else {
        p.delta5 = s.require<double>("Delta5");
        p.delta6 = s.require<double>("Delta6");
        p.validate();
    }
    s.finish();
    return p;
}

EffectiveCoefficients read_coefficients(Section& s) {
    EffectiveCoefficients k;
    k.V1 = s.require<double>("V1");
    k.V2 = s.require<double>("V2");
    k.U = s.require<double>("U");
    k.Tplus = s.require<double>("Tplus");
    k.Tminus = s.require<double>("Tminus");
    k.N = s.require<double>("N");
    s.finish();
    k.validate();
    return k;
}

MeanFieldState read_point(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError(where + ": initial conditions are [xi, theta] pairs");
    MeanFieldState s{v[0].get<double>(), v[1].get<double>()};
    if (!(std::abs(s.xi) < 1.0)) throw ConfigError(where + ": initial xi must satisfy |xi| < 1");
    return s;
}

std::vector<double> read_numbers(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(where + " must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

EffectiveCoefficients RunConfig::resolved_coefficients() const {
    if (coefficients) return *coefficients;
    if (!microscopic) throw ConfigError("config needs a 'microscopic' or a 'coefficients' section");
    return effective_coefficients(*microscopic, N, coefficient_options);
}

const MicroscopicParams& RunConfig::require_microscopic(const std::string& verb) const {
    if (!microscopic) throw ConfigError(verb + " needs the 'microscopic' section");
    return *microscopic;
}

RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config root must be an object");
    Section root(j, "<root>", true);
    const int version = root.require<int>("schema_version");
    if (version != config_schema_version)
        throw ConfigError("unsupported schema_version " + std::to_string(version) + " (expected " +
                          std::to_string(config_schema_version) + ")");

    RunConfig c;
    const bool has_micro = root.has("microscopic");
    const bool has_coeff = root.has("coefficients");
    if (has_micro && has_coeff)
        throw ConfigError(
            "exactly one of 'microscopic' and 'coefficients' may be given; both are present in this config");

    c.N = root.get<double>("N", c.N);
    if (has_micro) {
        auto s = *root.child("microscopic");
        c.microscopic = read_microscopic(s);
    }
    if (has_coeff) {
        if (root.has("N")) throw ConfigError("'N' belongs inside 'coefficients' when coefficients are given directly");
        auto s = *root.child("coefficients");
        c.coefficients = read_coefficients(s);
        c.N = c.coefficients->N;
    }
    if (!(c.N > 0.0)) throw ConfigError("N must be positive");

    if (auto s = root.child("regime")) {
        c.regime.much_less = s->get<double>("much_less", c.regime.much_less);
        c.regime.resonance_tolerance = s->get<double>("resonance_tolerance", c.regime.resonance_tolerance);
        c.coefficient_options.guard_band = s->get<double>("guard_band", c.coefficient_options.guard_band);
        s->finish();
    }
    if (auto s = root.child("portrait")) {
        c.portrait.xi_min = s->get<double>("xi_min", c.portrait.xi_min);
        c.portrait.xi_max = s->get<double>("xi_max", c.portrait.xi_max);
        c.portrait.theta_min = s->get<double>("theta_min", c.portrait.theta_min);
        c.portrait.theta_max = s->get<double>("theta_max", c.portrait.theta_max);
        c.portrait.n_xi = s->get<int>("xi_points", c.portrait.n_xi);
        c.portrait.n_theta = s->get<int>("theta_points", c.portrait.n_theta);
        s->finish();
    }
    if (auto s = root.child("evolve")) {
        if (s->has("initial")) c.evolve.initial = read_point(s->raw("initial"), "evolve.initial");
        c.evolve.t_end = s->get<double>("t_end", c.evolve.t_end);
        c.evolve.integrator.tolerance = s->get<double>("tolerance", c.evolve.integrator.tolerance);
        c.evolve.integrator.xi_guard = s->get<double>("xi_guard", c.evolve.integrator.xi_guard);
        c.evolve.integrator.sample_dt = s->get<double>("sample_dt", c.evolve.integrator.sample_dt);
        s->finish();
    }
    if (auto s = root.child("classify")) {
        if (s->has("initial_conditions")) {
            const auto& list = s->raw("initial_conditions");
            if (!list.is_array()) throw ConfigError("classify.initial_conditions must be an array");
            for (const auto& v : list) c.classify.initial.push_back(read_point(v, "classify.initial_conditions"));
        }
        if (auto l = s->child("lattice")) {
            LatticeSpec spec;
            spec.xi_min = l->get<double>("xi_min", spec.xi_min);
            spec.xi_max = l->get<double>("xi_max", spec.xi_max);
            spec.n_xi = l->get<int>("xi_points", spec.n_xi);
            spec.n_theta = l->get<int>("theta_points", spec.n_theta);
            l->finish();
            if (spec.n_xi < 1 || spec.n_theta < 1) throw ConfigError("classify.lattice needs at least one point per axis");
            if (!(spec.xi_min > -1.0 && spec.xi_max < 1.0 && spec.xi_min <= spec.xi_max))
                throw ConfigError("classify.lattice xi range must lie inside (-1, 1)");
            c.classify.lattice = spec;
        }
        c.classify.period.tolerance = s->get<double>("tolerance", c.classify.period.tolerance);
        c.classify.period.cap_factor = s->get<double>("cap_factor", c.classify.period.cap_factor);
        c.classify.separatrix = s->get<bool>("separatrix", c.classify.separatrix);
        s->finish();
    }
    if (auto s = root.child("sweep")) {
        c.sweep.tminus_min = s->get<double>("tminus_min", c.sweep.tminus_min);
        c.sweep.tminus_max = s->get<double>("tminus_max", c.sweep.tminus_max);
        c.sweep.points = s->get<int>("points", c.sweep.points);
        c.sweep.n = s->get<int>("n", c.sweep.n);
        c.sweep.jump_factor = s->get<double>("jump_factor", c.sweep.jump_factor);
        c.sweep.keep_amplitudes = s->get<bool>("keep_amplitudes", c.sweep.keep_amplitudes);
        s->finish();
        if (c.sweep.points < 2) throw ConfigError("sweep.points must be at least 2");
        if (!(c.sweep.tminus_min < c.sweep.tminus_max)) throw ConfigError("sweep needs tminus_min < tminus_max");
        if (c.sweep.n < 0) throw ConfigError("sweep.n must be non-negative");
    }
    if (auto s = root.child("validate")) {
        if (s->has("occupations")) {
            const auto& list = s->raw("occupations");
            c.validate.occupations.clear();
            if (!list.is_array()) throw ConfigError("validate.occupations must be an array of [n1, n2]");
            for (const auto& v : list) {
                if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
                    throw ConfigError("validate.occupations must be an array of [n1, n2]");
                const int n1 = v[0].get<int>(), n2 = v[1].get<int>();
                if (n1 < 0 || n2 < 0 || n1 + n2 == 0)
                    throw ConfigError("validate.occupations entries need n1, n2 >= 0 and n1 + n2 > 0");
                c.validate.occupations.emplace_back(n1, n2);
            }
            if (c.validate.occupations.empty()) throw ConfigError("validate.occupations is empty");
        }
        auto& o = c.validate.compare;
        o.cutoff = s->get<int>("cutoff", o.cutoff);
        o.t_end = s->get<double>("t_end", o.t_end);
        o.step_factor = s->get<double>("step_factor", o.step_factor);
        o.samples = s->get<int>("samples", o.samples);
        o.tolerance = s->get<double>("tolerance", o.tolerance);
        o.check_cutoff = s->get<bool>("check_cutoff", o.check_cutoff);
        o.check_dt = s->get<bool>("check_dt", o.check_dt);
        s->finish();
        if (o.cutoff < 0) throw ConfigError("validate.cutoff must be non-negative");
        if (o.samples < 2) throw ConfigError("validate.samples must be at least 2");
        if (!(o.step_factor > 0.0)) throw ConfigError("validate.step_factor must be positive");
    }
    c.validate.compare.regime = c.regime;
    if (auto s = root.child("detect")) {
        auto& st = c.detect.state;
        st.n = s->get<int>("n", st.n);
        st.zeta = s->get<double>("zeta", st.zeta);
        st.eta = s->get<double>("eta", st.eta);
        if (s->has("gamma_t")) c.detect.gamma_t = read_numbers(s->raw("gamma_t"), "detect.gamma_t");
        c.detect.noise_sigma = s->get<double>("noise_sigma", c.detect.noise_sigma);
        const auto conv = s->get<std::string>("convention", "standard");
        if (conv == "standard")
            c.detect.convention = PhaseConvention::standard;
        else if (conv == "conjugate")
            c.detect.convention = PhaseConvention::conjugate;
        else
            throw ConfigError("detect.convention must be 'standard' or 'conjugate'");
        c.detect.input_csv = s->get<std::string>("input_csv", c.detect.input_csv);
        s->finish();
        st.validate();
        if (c.detect.noise_sigma < 0.0) throw ConfigError("detect.noise_sigma must be non-negative");
    }
    if (c.detect.gamma_t.empty())
        for (int i = 0; i < 16; ++i) c.detect.gamma_t.push_back(std::numbers::pi * (i + 0.5) / 16.0);
    root.finish();

    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
    c.hash = buf;
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

}  // namespace polariton
