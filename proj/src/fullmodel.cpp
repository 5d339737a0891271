#include "polariton/fullmodel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numbers>
#include <numeric>

#include "polariton/errors.hpp"
#include "polariton/parallel.hpp"
#include "polariton/quantum_ed.hpp"

namespace polariton {

namespace {

using cplx = std::complex<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

enum Mode { S12 = 0, S13, S14, S15, S16, S17, A };

// Adds coef * c^dag_{create...} a_{annihilate...} acting on every basis state.
void add_term(Triplets& out, const MultiModeBasis& basis, double coef, std::initializer_list<int> create,
              std::initializer_list<int> annihilate) {
    if (coef == 0.0) return;
    for (std::size_t col = 0; col < basis.size(); ++col) {
        Occupation o = basis.state(col);
        double amp = coef;
        bool alive = true;
        for (int m : annihilate) {
            if (o[m] == 0) {
                alive = false;
                break;
            }
            amp *= std::sqrt(static_cast<double>(o[m]));
            --o[m];
        }
        if (!alive) continue;
        for (int m : create) {
            ++o[m];
            amp *= std::sqrt(static_cast<double>(o[m]));
        }
        // Terms leaving the truncated basis are dropped; leakage is measured separately.
        if (auto row = basis.index(o)) out.emplace_back(static_cast<int>(*row), static_cast<int>(col), amp);
    }
}

Eigen::SparseMatrix<double> to_sparse(const Triplets& t, std::size_t n) {
    Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

// Indices connected to the support of psi0 through any Hamiltonian entry.
std::vector<int> reachable_sector(const RotatingHamiltonian& h, const Eigen::VectorXcd& psi0) {
    const auto n = static_cast<std::size_t>(psi0.size());
    std::vector<std::vector<int>> adj(n);
    for (const auto* m : {&h.h_static, &h.raise25, &h.raise36})
        for (int c = 0; c < m->outerSize(); ++c)
            for (Eigen::SparseMatrix<double>::InnerIterator it(*m, c); it; ++it) {
                if (it.value() == 0.0) continue;
                adj[it.row()].push_back(static_cast<int>(it.col()));
                adj[it.col()].push_back(static_cast<int>(it.row()));
            }
    std::vector<char> seen(n, 0);
    std::deque<int> queue;
    for (std::size_t i = 0; i < n; ++i)
        if (psi0(static_cast<Eigen::Index>(i)) != cplx(0.0)) {
            seen[i] = 1;
            queue.push_back(static_cast<int>(i));
        }
    while (!queue.empty()) {
        const int i = queue.front();
        queue.pop_front();
        for (int j : adj[i])
            if (!seen[j]) {
                seen[j] = 1;
                queue.push_back(j);
            }
    }
    std::vector<int> out;
    for (std::size_t i = 0; i < n; ++i)
        if (seen[i]) out.push_back(static_cast<int>(i));
    return out;
}

Eigen::MatrixXd restrict(const Eigen::SparseMatrix<double>& m, const std::vector<int>& idx) {
    const Eigen::MatrixXd d(m);
    Eigen::MatrixXd r(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) r(i, j) = d(idx[i], idx[j]);
    return r;
}

// Width of the static spectrum on the sector plus the drive frequencies: the
// fastest phase the integrator has to resolve.
double frequency_span(const RotatingHamiltonian& h, const std::vector<int>& sector) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(restrict(h.h_static, sector), Eigen::EigenvaluesOnly);
    const auto& e = eig.eigenvalues();
    return (e.size() ? e.maxCoeff() - e.minCoeff() : 0.0) + std::abs(h.freq25) + std::abs(h.freq36);
}

// Largest step <= target that divides every output interval evenly.
double quantized_step(double t_end, int intervals, double target) {
    const long per = std::max(1L, static_cast<long>(std::ceil(t_end / intervals / target - 1e-9)));
    return t_end / static_cast<double>(per * intervals);
}

double derived_step(const RotatingHamiltonian& h, const std::vector<int>& sector, double t_end, int intervals,
                    double step_factor) {
    const double span = frequency_span(h, sector);
    return quantized_step(t_end, intervals, span > 0.0 ? step_factor / span : t_end / intervals);
}

}  // namespace

MultiModeBasis::MultiModeBasis(int cutoff) : cutoff_(cutoff) {
    if (cutoff < 0) throw ConfigError("basis: cutoff must be non-negative");
    for (int total = 0; total <= cutoff; ++total) {
        // Enumerate compositions of `total` into seven parts in lexicographic order.
        Occupation o{};
        std::function<void(int, int)> rec = [&](int mode, int left) {
            if (mode == mode_count - 1) {
                o[mode] = left;
                index_.emplace(o, states_.size());
                states_.push_back(o);
                return;
            }
            for (int v = left; v >= 0; --v) {
                o[mode] = v;
                rec(mode + 1, left - v);
            }
        };
        rec(0, total);
    }
}

std::optional<std::size_t> MultiModeBasis::index(const Occupation& o) const {
    const auto it = index_.find(o);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

RotatingHamiltonian rotating_hamiltonian(const MicroscopicParams& p, const MultiModeBasis& basis) {
    const double r = std::sqrt(2.0) * p.omega / 2.0;
    Triplets hs;
    add_term(hs, basis, p.epsilon, {S12}, {S12});
    add_term(hs, basis, -p.epsilon, {S13}, {S13});
    add_term(hs, basis, p.delta, {S14}, {S14});
    add_term(hs, basis, p.mw_detuning, {S17}, {S17});
    add_term(hs, basis, r, {S12}, {S14});
    add_term(hs, basis, r, {S14}, {S12});
    add_term(hs, basis, r, {S13}, {S14});
    add_term(hs, basis, r, {S14}, {S13});
    add_term(hs, basis, p.g, {A}, {S14});
    add_term(hs, basis, p.g, {S14}, {A});
    add_term(hs, basis, p.omega_nu1 / 2.0, {S15}, {S17});
    add_term(hs, basis, p.omega_nu1 / 2.0, {S17}, {S15});
    add_term(hs, basis, p.omega_nu2 / 2.0, {S16}, {S17});
    add_term(hs, basis, p.omega_nu2 / 2.0, {S17}, {S16});

    Triplets r25, r36;
    add_term(r25, basis, p.g25, {S12, A}, {S15});
    add_term(r36, basis, p.g36, {S13, A}, {S16});

    RotatingHamiltonian h;
    h.h_static = to_sparse(hs, basis.size());
    h.raise25 = to_sparse(r25, basis.size());
    h.raise36 = to_sparse(r36, basis.size());
    h.freq25 = p.delta5 + p.epsilon;
    h.freq36 = p.delta6 - p.epsilon;
    return h;
}

Eigen::MatrixXcd RotatingHamiltonian::at(double t) const {
    const Eigen::MatrixXd s(h_static), r5(raise25), r6(raise36);
    const cplx e5 = std::polar(1.0, -freq25 * t), e6 = std::polar(1.0, -freq36 * t);
    Eigen::MatrixXcd m = s.cast<cplx>();
    m += e5 * r5.cast<cplx>() + std::conj(e5) * r5.transpose().cast<cplx>();
    m += e6 * r6.cast<cplx>() + std::conj(e6) * r6.transpose().cast<cplx>();
    return m;
}

Eigen::MatrixXcd h_rot(const MicroscopicParams& p, double t, const MultiModeBasis& basis) {
    return rotating_hamiltonian(p, basis).at(t);
}

MultiModeState polariton_state(const MicroscopicParams& p, int n1, int n2, const MultiModeBasis& basis) {
    if (n1 < 0 || n2 < 0) throw ConfigError("polariton_state: occupations must be non-negative");
    if (n1 + n2 > basis.cutoff())
        throw ConfigError("polariton_state: cutoff " + std::to_string(basis.cutoff()) + " is below the minimum " +
                          std::to_string(n1 + n2) + " for this occupation");
    const auto dark = quasi_dark_modes(p);
    // Quasi-dark vector components over (S12, S13, S14, a) mapped onto mode indices.
    const std::array<int, 4> modes{S12, S13, S14, A};

    // Expand the product of creation operators as a polynomial in mode creators.
    std::map<Occupation, double> poly{{Occupation{}, 1.0}};
    for (int q = 0; q < n1 + n2; ++q) {
        const auto& v = q < n1 ? dark[0] : dark[1];
        std::map<Occupation, double> next;
        for (const auto& [mono, c] : poly)
            for (int j = 0; j < 4; ++j) {
                if (v(j) == 0.0) continue;
                Occupation m = mono;
                ++m[modes[j]];
                next[m] += c * v(j);
            }
        poly = std::move(next);
    }
    MultiModeState s;
    s.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
    for (const auto& [mono, c] : poly) {
        double f = 1.0;
        for (int m : mono) f *= std::tgamma(m + 1.0);
        s.amplitudes(static_cast<Eigen::Index>(*basis.index(mono))) += c * std::sqrt(f);
    }
    s.amplitudes /= s.amplitudes.norm();
    return s;
}

FidelitySeries evolve_full(const MultiModeState& psi0, const MicroscopicParams& p, const MultiModeBasis& basis,
                           double t_end, const EvolveOptions& opts) {
    if (!(t_end > 0.0)) throw ConfigError("evolve_full: t_end must be positive");
    if (opts.samples < 2) throw ConfigError("evolve_full: need at least 2 samples");
    if (psi0.amplitudes.size() != static_cast<Eigen::Index>(basis.size()))
        throw ConfigError("evolve_full: state does not match the basis");
    if (std::abs(psi0.amplitudes.norm() - 1.0) > 1e-12) throw ConfigError("evolve_full: initial state not normalized");

    const RotatingHamiltonian h = rotating_hamiltonian(p, basis);
    std::vector<int> sector;
    if (opts.prune) {
        sector = reachable_sector(h, psi0.amplitudes);
    } else {
        sector.resize(basis.size());
        std::iota(sector.begin(), sector.end(), 0);
    }
    const auto m = static_cast<Eigen::Index>(sector.size());

    // Exact eigenbasis of the static part on the sector.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(restrict(h.h_static, sector));
    const Eigen::VectorXd E = eig.eigenvalues();
    const Eigen::MatrixXd V = eig.eigenvectors();
    const Eigen::MatrixXd B5 = V.transpose() * restrict(h.raise25, sector) * V;
    const Eigen::MatrixXd B6 = V.transpose() * restrict(h.raise36, sector) * V;
    // e^{-iwt} B + e^{iwt} B^T = cos(wt) (B + B^T) - i sin(wt) (B - B^T)
    const Eigen::MatrixXd S5 = B5 + B5.transpose(), A5 = B5 - B5.transpose();
    const Eigen::MatrixXd S6 = B6 + B6.transpose(), A6 = B6 - B6.transpose();
    const bool driven = B5.squaredNorm() + B6.squaredNorm() > 0.0;

    Eigen::VectorXcd x0(m);
    for (Eigen::Index i = 0; i < m; ++i) x0(i) = psi0.amplitudes(sector[i]);
    const Eigen::VectorXcd c0 = V.transpose().cast<cplx>() * x0;

    const int intervals = opts.samples - 1;
    const double dt = opts.dt > 0.0 ? quantized_step(t_end, intervals, opts.dt)
                                    : derived_step(h, sector, t_end, intervals, opts.step_factor);
    const long per_sample = std::lround(t_end / intervals / dt);
    const long total = per_sample * intervals;

    FidelitySeries out;
    out.dt = dt;
    out.steps = total;
    out.sector_size = sector.size();

    // Boundary states: total quanta at the cutoff.
    std::vector<Eigen::Index> boundary;
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& o = basis.state(sector[i]);
        if (std::accumulate(o.begin(), o.end(), 0) == basis.cutoff()) boundary.push_back(i);
    }

    Eigen::VectorXcd phi = c0;
    auto phases = [&](double t) {
        Eigen::VectorXcd q(m);
        for (Eigen::Index i = 0; i < m; ++i) q(i) = std::polar(1.0, -E(i) * t);
        return q;
    };
    auto record = [&](double t, const Eigen::VectorXcd& ph) {
        const Eigen::VectorXcd lab = ph.cwiseProduct(phi);
        const double f = std::abs(c0.dot(lab));
        const double nd = std::abs(phi.norm() - 1.0);
        double leak = 0.0;
        if (!boundary.empty()) {
            const Eigen::VectorXcd x = V.cast<cplx>() * lab;
            for (auto i : boundary) leak += std::norm(x(i));
        }
        out.t.push_back(t);
        out.fidelity.push_back(f);
        out.norm_drift.push_back(nd);
        out.leakage.push_back(leak);
        out.max_norm_drift = std::max(out.max_norm_drift, nd);
        out.max_leakage = std::max(out.max_leakage, leak);
    };

    // Interaction-picture generator: -i conj(p) .* (M(t) (p .* y)).
    Eigen::VectorXd zr(m), zi(m), ur(m), ui(m);
    auto deriv = [&](const Eigen::VectorXcd& ph, double c5, double s5, double c6, double s6, const Eigen::VectorXcd& y,
                     Eigen::VectorXcd& dy) {
        const Eigen::VectorXcd z = ph.cwiseProduct(y);
        zr = z.real();
        zi = z.imag();
        // M z = (c5 S5 + c6 S6) z - i (s5 A5 + s6 A6) z
        ur.noalias() = c5 * (S5 * zr) + c6 * (S6 * zr) + s5 * (A5 * zi) + s6 * (A6 * zi);
        ui.noalias() = c5 * (S5 * zi) + c6 * (S6 * zi) - s5 * (A5 * zr) - s6 * (A6 * zr);
        for (Eigen::Index i = 0; i < m; ++i) dy(i) = cplx(0.0, -1.0) * std::conj(ph(i)) * cplx(ur(i), ui(i));
    };

    Eigen::VectorXcd ph0 = phases(0.0);
    record(0.0, ph0);
    if (!driven) {
        // Nothing to integrate: the static evolution is exact.
        for (int s = 1; s <= intervals; ++s) record(t_end * s / intervals, phases(t_end * s / intervals));
        return out;
    }

    const Eigen::VectorXcd half_step = phases(0.5 * dt);
    const cplx w5_half = std::polar(1.0, -h.freq25 * 0.5 * dt), w6_half = std::polar(1.0, -h.freq36 * 0.5 * dt);
    Eigen::VectorXcd k1(m), k2(m), k3(m), k4(m), tmp(m);
    Eigen::VectorXcd ph = ph0, ph_mid(m), ph_end(m);
    cplx e5 = 1.0, e6 = 1.0;
    long n = 0;
    for (int s = 1; s <= intervals; ++s) {
        for (long j = 0; j < per_sample; ++j, ++n) {
            const double t = dt * static_cast<double>(n);
            if (n % 1024 == 0) {
                // Refresh the multiplicative phase recurrences against round-off.
                ph = phases(t);
                e5 = std::polar(1.0, -h.freq25 * t);
                e6 = std::polar(1.0, -h.freq36 * t);
            }
            ph_mid = ph.cwiseProduct(half_step);
            ph_end = ph_mid.cwiseProduct(half_step);
            const cplx e5m = e5 * w5_half, e6m = e6 * w6_half;
            const cplx e5e = e5m * w5_half, e6e = e6m * w6_half;

            deriv(ph, e5.real(), -e5.imag(), e6.real(), -e6.imag(), phi, k1);
            tmp = phi + 0.5 * dt * k1;
            deriv(ph_mid, e5m.real(), -e5m.imag(), e6m.real(), -e6m.imag(), tmp, k2);
            tmp = phi + 0.5 * dt * k2;
            deriv(ph_mid, e5m.real(), -e5m.imag(), e6m.real(), -e6m.imag(), tmp, k3);
            tmp = phi + dt * k3;
            deriv(ph_end, e5e.real(), -e5e.imag(), e6e.real(), -e6e.imag(), tmp, k4);
            phi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

            ph = ph_end;
            e5 = e5e;
            e6 = e6e;
        }
        const double ts = dt * static_cast<double>(n);
        record(ts, phases(ts));
    }
    if (out.max_norm_drift > opts.norm_budget) throw NormDriftError(out.max_norm_drift, opts.norm_budget, dt / 2.0);
    return out;
}

Eigen::VectorXcd two_mode_fock(int n1, int n2) {
    if (n1 < 0 || n2 < 0) throw ConfigError("two_mode_fock: occupations must be non-negative");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n1 + n2 + 1);
    v(n1) = 1.0;
    return v;
}

std::vector<double> evolve_effective(const EffectiveCoefficients& k, const Eigen::VectorXcd& psi0,
                                     const std::vector<double>& times) {
    const int n = static_cast<int>(psi0.size()) - 1;
    const auto h = build_hamiltonian(k, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h.dense());
    const Eigen::VectorXcd a = eig.eigenvectors().transpose().cast<cplx>() * psi0;
    std::vector<double> f;
    f.reserve(times.size());
    for (double t : times) {
        cplx s = 0.0;
        for (Eigen::Index i = 0; i < a.size(); ++i) s += std::norm(a(i)) * std::polar(1.0, -eig.eigenvalues()(i) * t);
        f.push_back(std::abs(s));
    }
    return f;
}

double default_window(const EffectiveCoefficients& k) {
    const double c = std::sqrt(2.0) * std::abs(k.Tplus - k.Tminus);
    if (c > 0.0) return std::numbers::pi / (2.0 * c);
    const double v = std::max({std::abs(k.V1), std::abs(k.V2), std::abs(k.U)});
    return v > 0.0 ? 2.0 * std::numbers::pi / v : 1.0;
}

CompareReport compare(const MicroscopicParams& p, const std::vector<std::pair<int, int>>& occupations,
                      const CompareOptions& opts) {
    if (occupations.empty()) throw ConfigError("compare: no occupations given");
    CompareReport rep;
    rep.regime = validate_regime(p, opts.regime);
    rep.out_of_regime = !rep.regime.pass;

    int max_n = 0;
    for (auto [a, b] : occupations) max_n = std::max(max_n, a + b);
    rep.coefficients = effective_coefficients(p, max_n);
    rep.t_end = opts.t_end > 0.0 ? opts.t_end : default_window(rep.coefficients);
    rep.cutoff = opts.cutoff > 0 ? opts.cutoff : max_n + 2;
    if (rep.cutoff < max_n)
        throw ConfigError("compare: cutoff " + std::to_string(rep.cutoff) + " is below the minimum " +
                          std::to_string(max_n));

    // Independent runs: (occupation, variant) with variant 0 = base, 1 = cutoff + 1, 2 = dt / 2.
    struct Job {
        std::size_t occ;
        int variant;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < occupations.size(); ++i) {
        jobs.push_back({i, 0});
        if (opts.check_cutoff) jobs.push_back({i, 1});
        if (opts.check_dt) jobs.push_back({i, 2});
    }
    // dt of the base run, shared by the cutoff + 1 run and halved for the dt check.
    std::vector<double> base_dt(occupations.size());
    for (std::size_t i = 0; i < occupations.size(); ++i) {
        const MultiModeBasis basis(rep.cutoff);
        const auto h = rotating_hamiltonian(p, basis);
        const auto psi = polariton_state(p, occupations[i].first, occupations[i].second, basis);
        base_dt[i] = derived_step(h, reachable_sector(h, psi.amplitudes), rep.t_end, opts.samples - 1, opts.step_factor);
    }

    std::vector<FidelitySeries> results(jobs.size());
    parallel_for(jobs.size(), opts.workers, [&](std::size_t j) {
        const auto [n1, n2] = occupations[jobs[j].occ];
        const int cutoff = rep.cutoff + (jobs[j].variant == 1 ? 1 : 0);
        const MultiModeBasis basis(cutoff);
        EvolveOptions eo;
        eo.samples = opts.samples;
        eo.dt = jobs[j].variant == 2 ? base_dt[jobs[j].occ] / 2.0 : base_dt[jobs[j].occ];
        results[j] = evolve_full(polariton_state(p, n1, n2, basis), p, basis, rep.t_end, eo);
    });

    rep.within_tolerance = true;
    for (std::size_t i = 0; i < occupations.size(); ++i) {
        OccupationComparison oc;
        oc.n1 = occupations[i].first;
        oc.n2 = occupations[i].second;
        EffectiveCoefficients k = rep.coefficients;
        k.N = oc.n1 + oc.n2;
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            if (jobs[j].occ != i) continue;
            if (jobs[j].variant == 0) oc.full = results[j];
        }
        oc.f_eff = evolve_effective(k, two_mode_fock(oc.n1, oc.n2), oc.full.t);
        for (std::size_t s = 0; s < oc.f_eff.size(); ++s) {
            oc.deviation.push_back(std::abs(oc.full.fidelity[s] - oc.f_eff[s]));
            oc.sup_deviation = std::max(oc.sup_deviation, oc.deviation.back());
        }
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            if (jobs[j].occ != i || jobs[j].variant == 0) continue;
            double sup = 0.0;
            for (std::size_t s = 0; s < oc.full.fidelity.size(); ++s)
                sup = std::max(sup, std::abs(results[j].fidelity[s] - oc.full.fidelity[s]));
            (jobs[j].variant == 1 ? oc.cutoff_change : oc.dt_change) = sup;
        }
        rep.within_tolerance = rep.within_tolerance && oc.sup_deviation <= opts.tolerance;
        rep.runs.push_back(std::move(oc));
    }
    return rep;
}

}  // namespace polariton
