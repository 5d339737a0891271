#include "polariton/quantum_ed.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <utility>

#include "polariton/errors.hpp"
#include "polariton/parallel.hpp"

namespace polariton {

namespace {

// One ladder operator: mode 0 or 1, creation or annihilation.
struct Ladder {
    int mode;
    bool create;
};

// Applies a product of ladder operators (rightmost acts first) to |n0, n1>.
// Returns false when the state is annihilated.
bool apply_word(const std::vector<Ladder>& word, std::array<int, 2>& occ, double& amp) {
    amp = 1.0;
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        int& n = occ[it->mode];
        if (it->create) {
            amp *= std::sqrt(static_cast<double>(n + 1));
            ++n;
        } else {
            if (n == 0) return false;
            amp *= std::sqrt(static_cast<double>(n));
            --n;
        }
    }
    return true;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + m, v.end());
    if (v.size() % 2) return v[m];
    const double hi = v[m];
    return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + m));
}

void fix_sign(std::vector<double>& v) {
    const auto it = std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (it != v.end() && *it < 0.0)
        for (auto& x : v) x = -x;
}

QuantumGroundState make_state(double energy, std::vector<double> v, double residual) {
    fix_sign(v);
    QuantumGroundState g;
    g.energy = energy;
    g.entropy = entropy(v);
    g.mean_xi = mean_xi(v);
    g.residual = residual;
    g.amplitudes = std::move(v);
    return g;
}

}  // namespace

Eigen::MatrixXd TwoModeFockHamiltonian::dense() const {
    const int dim = static_cast<int>(diag.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) m(i, i) = diag[i];
    for (int i = 0; i + 1 < dim; ++i) m(i, i + 1) = m(i + 1, i) = offdiag[i];
    return m;
}

TwoModeFockHamiltonian build_hamiltonian(const EffectiveCoefficients& k, int n) {
    if (n < 0) throw ConfigError("build_hamiltonian: N must be non-negative");
    TwoModeFockHamiltonian h;
    h.n = n;
    h.diag.resize(n + 1);
    h.offdiag.resize(n);
    const double N = n;
    for (int i = 0; i <= n; ++i) {
        const double x = i;
        h.diag[i] = k.V1 / 2.0 * x * (x - 1.0) + k.V2 / 2.0 * (N - x) * (N - x - 1.0) + k.U * x * (N - x);
    }
    for (int i = 0; i < n; ++i) {
        const double x = i;
        h.offdiag[i] = std::sqrt((x + 1.0) * (N - x)) * ((N - 1.0) * k.Tplus + (2.0 * x - N + 1.0) * k.Tminus);
    }
    return h;
}

Eigen::MatrixXd dense_oracle(const EffectiveCoefficients& k, int n, TunnelingForm form) {
    if (n < 0 || n > dense_oracle_cap) throw ConfigError("dense_oracle: N outside [0, 8]");
    const Ladder c0{0, true}, a0{0, false}, c1{1, true}, a1{1, false};
    std::vector<std::pair<double, std::vector<Ladder>>> terms = {
        {k.V1 / 2.0, {c0, c0, a0, a0}},
        {k.V2 / 2.0, {c1, c1, a1, a1}},
        {k.U, {c0, a0, c1, a1}},
        {k.Tminus, {c0, c0, a0, a1}},
        {-k.Tminus, {c0, c1, a1, a1}},
        {k.Tminus, {c1, c0, a0, a0}},
        {-k.Tminus, {c1, c1, a1, a0}},
    };
    if (form == TunnelingForm::fixed_number) {
        terms.push_back({(n - 1.0) * k.Tplus, {c0, a1}});
        terms.push_back({(n - 1.0) * k.Tplus, {c1, a0}});
    } else {
        terms.push_back({k.Tplus, {c0, c0, a0, a1}});
        terms.push_back({k.Tplus, {c0, c1, a1, a1}});
        terms.push_back({k.Tplus, {c1, c0, a0, a0}});
        terms.push_back({k.Tplus, {c1, c1, a1, a0}});
    }

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int col = 0; col <= n; ++col) {
        for (const auto& [coef, word] : terms) {
            std::array<int, 2> occ{col, n - col};
            double amp = 0.0;
            if (!apply_word(word, occ, amp)) continue;
            if (occ[0] + occ[1] != n) throw std::logic_error("dense_oracle: operator left the fixed-N sector");
            h(occ[0], col) += coef * amp;
        }
    }
    return h;
}

double entropy(const std::vector<double>& amplitudes) {
    double s = 0.0;
    for (double c : amplitudes) {
        const double p = c * c;
        if (p > 0.0) s -= p * std::log(p);
    }
    return s;
}

double mean_xi(const std::vector<double>& amplitudes) {
    const int n = static_cast<int>(amplitudes.size()) - 1;
    if (n <= 0) return 0.0;
    double m = 0.0;
    for (int i = 0; i <= n; ++i) m += amplitudes[i] * amplitudes[i] * (2.0 * i - n) / n;
    return m;
}

QuantumGroundState ground_state_ed(const TwoModeFockHamiltonian& h, double degeneracy_scale) {
    const std::size_t dim = h.diag.size();
    if (dim == 0 || h.offdiag.size() + 1 != dim) throw ConfigError("ground_state_ed: malformed Hamiltonian");
    const double band = 1e-10 * (degeneracy_scale > 0.0 ? degeneracy_scale : 1.0);

    const bool diagonal = std::all_of(h.offdiag.begin(), h.offdiag.end(), [](double e) { return e == 0.0; });
    if (diagonal) {
        const auto it = std::min_element(h.diag.begin(), h.diag.end());
        const auto i0 = static_cast<std::size_t>(it - h.diag.begin());
        std::vector<double> v(dim, 0.0);
        v[i0] = 1.0;
        auto g = make_state(*it, v, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            if (i == i0 || h.diag[i] - *it > band) continue;
            std::vector<double> w(dim, 0.0);
            w[i] = 1.0;
            g.degenerate_partners.push_back(make_state(h.diag[i], w, 0.0));
        }
        return g;
    }

    const auto t = h.as_tridiagonal();
    const double e0 = bisect_eigenvalue(t, 0);
    const auto p0 = inverse_iteration(t, e0);
    auto g = make_state(e0, p0.vector, p0.residual);
    if (dim > 1) {
        const double e1 = bisect_eigenvalue(t, 1);
        if (e1 - e0 <= band) {
            const auto p1 = inverse_iteration(t, e1, {p0.vector});
            g.degenerate_partners.push_back(make_state(e1, p1.vector, p1.residual));
        }
    }
    return g;
}

JumpReport detect_jump(const std::vector<double>& s, double factor) {
    JumpReport r;
    if (s.size() < 2) return r;
    std::vector<double> ds(s.size() - 1);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) ds[i] = std::abs(s[i + 1] - s[i]);
    const auto it = std::max_element(ds.begin(), ds.end());
    r.interval = static_cast<int>(it - ds.begin());
    r.max_delta_s = *it;
    r.median_delta_s = median(ds);
    if (r.interval > 0) r.neighbour_delta_s = ds[r.interval - 1];
    if (r.interval + 1 < static_cast<int>(ds.size()))
        r.neighbour_delta_s = std::max(r.neighbour_delta_s, ds[r.interval + 1]);
    r.found = ds.size() >= 3 && r.max_delta_s > 0.0 && r.max_delta_s > factor * r.median_delta_s &&
              r.max_delta_s > factor * r.neighbour_delta_s;
    return r;
}

SweepTable sweep_tminus(const EffectiveCoefficients& templ, int n, const std::vector<double>& samples,
                        const SweepOptions& opts) {
    if (!std::is_sorted(samples.begin(), samples.end())) throw ConfigError("sweep_tminus: samples must be sorted");
    SweepTable table;
    table.rows.resize(samples.size());
    const double scale = templ.U != 0.0 ? std::abs(templ.U) : 1.0;
    parallel_for(samples.size(), opts.workers, [&](std::size_t i) {
        EffectiveCoefficients k = templ;
        k.Tminus = samples[i];
        const auto g = ground_state_ed(build_hamiltonian(k, n), scale);
        SweepRow row{samples[i], g.energy, g.entropy, g.mean_xi, {}};
        if (opts.keep_amplitudes) row.amplitudes = g.amplitudes;
        table.rows[i] = std::move(row);
    });

    std::vector<double> s(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) s[i] = table.rows[i].entropy;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) table.delta_s.push_back(std::abs(s[i + 1] - s[i]));
    table.jump = detect_jump(s, opts.jump_factor);

    if (samples.size() >= 3) {
        double best = -1.0;
        for (std::size_t i = 0; i + 2 < samples.size(); ++i) {
            const auto& r = table.rows;
            const double s0 = (r[i + 1].e_g - r[i].e_g) / (r[i + 1].tminus - r[i].tminus);
            const double s1 = (r[i + 2].e_g - r[i + 1].e_g) / (r[i + 2].tminus - r[i + 1].tminus);
            if (std::abs(s1 - s0) > best) {
                best = std::abs(s1 - s0);
                table.kink_tminus = r[i + 1].tminus;
            }
        }
    }
    return table;
}

}  // namespace polariton
