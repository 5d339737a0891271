#include "polariton/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "polariton/errors.hpp"

namespace polariton {

namespace {

double pivot_floor(const SymmetricTridiagonal& t) {
    double m = 1.0;
    for (double e : t.offdiag) m = std::max(m, e * e);
    return std::numeric_limits<double>::min() * m;
}

double norm(const std::vector<double>& v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); }

double residual(const SymmetricTridiagonal& t, double value, const std::vector<double>& v) {
    const auto tv = t.multiply(v);
    double r = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) r += (tv[i] - value * v[i]) * (tv[i] - value * v[i]);
    return std::sqrt(r);
}

double matrix_scale(const SymmetricTridiagonal& t) {
    double m = 0.0;
    for (double d : t.diag) m = std::max(m, std::abs(d));
    for (double e : t.offdiag) m = std::max(m, std::abs(e));
    return m;
}

}  // namespace

std::vector<double> SymmetricTridiagonal::multiply(const std::vector<double>& x) const {
    const std::size_t n = diag.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = diag[i] * x[i];
        if (i > 0) s += offdiag[i - 1] * x[i - 1];
        if (i + 1 < n) s += offdiag[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

int sturm_count(const SymmetricTridiagonal& t, double x) {
    const double pivmin = pivot_floor(t);
    int count = 0;
    double q = t.diag[0] - x;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < t.diag.size(); ++i) {
        q = t.diag[i] - x - t.offdiag[i - 1] * t.offdiag[i - 1] / q;
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

std::pair<double, double> gershgorin_bounds(const SymmetricTridiagonal& t) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    const std::size_t n = t.diag.size();
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(t.offdiag[i - 1]);
        if (i + 1 < n) r += std::abs(t.offdiag[i]);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    const double pad = 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)) +
                       pivot_floor(t);
    return {lo - pad, hi + pad};
}

double bisect_eigenvalue(const SymmetricTridiagonal& t, int index) {
    if (t.diag.empty() || index < 0 || static_cast<std::size_t>(index) >= t.diag.size())
        throw ConfigError("bisect_eigenvalue: index out of range");
    auto [lo, hi] = gershgorin_bounds(t);
    const double eps = std::numeric_limits<double>::epsilon();
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi)) + pivot_floor(t)) break;
        if (mid <= lo || mid >= hi) break;
        if (sturm_count(t, mid) > index) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> solve_shifted(const SymmetricTridiagonal& t, double shift, std::vector<double> b) {
    const std::size_t n = t.diag.size();
    if (b.size() != n) throw ConfigError("solve_shifted: size mismatch");
    if (n == 0) return b;
    std::vector<double> d(n), du(n > 1 ? n - 1 : 0), dl(du.size()), du2(n > 2 ? n - 2 : 0, 0.0);
    std::vector<char> swapped(du.size(), 0);
    for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - shift;
    for (std::size_t i = 0; i + 1 < n; ++i) du[i] = dl[i] = t.offdiag[i];
    // Singular pivots are replaced by a tiny multiple of the matrix scale; for
    // inverse iteration this is exactly the intended near-singular solve.
    const double tiny = std::numeric_limits<double>::epsilon() * std::max(matrix_scale(t), 1e-300);

    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (d[i] == 0.0) d[i] = tiny;
            const double fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
        } else {
            const double fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            const double tmp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = tmp - fact * d[i + 1];
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du[i + 1];
            }
            swapped[i] = 1;
        }
    }
    if (d[n - 1] == 0.0) d[n - 1] = tiny;

    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (swapped[i]) {
            const double tmp = b[i] - dl[i] * b[i + 1];
            b[i] = b[i + 1];
            b[i + 1] = tmp;
        } else {
            b[i + 1] -= dl[i] * b[i];
        }
    }
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    if (n > 2)
        for (std::size_t i = n - 2; i-- > 0;) b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    return b;
}

EigenPair inverse_iteration(const SymmetricTridiagonal& t, double value,
                            const std::vector<std::vector<double>>& previous) {
    const std::size_t n = t.diag.size();
    if (n == 0) throw ConfigError("inverse_iteration: empty matrix");
    const double scale = std::max(matrix_scale(t), std::numeric_limits<double>::min());
    const double target = 1e-10 * scale * std::sqrt(static_cast<double>(n));

    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    EigenPair best;
    best.residual = std::numeric_limits<double>::infinity();

    auto project = [&](std::vector<double>& v) {
        for (const auto& p : previous) {
            const double c = std::inner_product(v.begin(), v.end(), p.begin(), 0.0);
            for (std::size_t i = 0; i < n; ++i) v[i] -= c * p[i];
        }
    };

    // A stagnating solve is retried from a perturbed shift.
    for (int attempt = 0; attempt < 6; ++attempt) {
        const double shift = value + (attempt == 0 ? 0.0 : std::ldexp(1.0, 3 * attempt) *
                                                           std::numeric_limits<double>::epsilon() * scale *
                                                           (attempt % 2 ? 1.0 : -1.0));
        std::vector<double> v(n);
        for (auto& x : v) x = u(rng);
        project(v);
        double nv = norm(v);
        for (auto& x : v) x /= nv;
        for (int it = 0; it < 6; ++it) {
            v = solve_shifted(t, shift, std::move(v));
            project(v);
            nv = norm(v);
            if (!(nv > 0.0) || !std::isfinite(nv)) break;
            for (auto& x : v) x /= nv;
        }
        if (!(nv > 0.0) || !std::isfinite(nv)) continue;
        const double r = residual(t, value, v);
        if (r < best.residual) best = {value, v, r};
        if (r <= target) break;
    }
    if (!std::isfinite(best.residual)) throw DomainError("inverse iteration failed to produce an eigenvector");
    return best;
}

}  // namespace polariton
