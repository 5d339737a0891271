#pragma once

#include <vector>

namespace polariton {

// Real symmetric tridiagonal matrix: diag has n entries, offdiag n - 1.
struct SymmetricTridiagonal {
    std::vector<double> diag;
    std::vector<double> offdiag;

    std::size_t size() const { return diag.size(); }
    // y = T x
    std::vector<double> multiply(const std::vector<double>& x) const;
};

// Number of eigenvalues strictly below x (Sturm sequence count).
int sturm_count(const SymmetricTridiagonal& t, double x);

// Gershgorin interval containing the whole spectrum.
std::pair<double, double> gershgorin_bounds(const SymmetricTridiagonal& t);

// The index-th smallest eigenvalue (0-based) by bisection on the Sturm count.
double bisect_eigenvalue(const SymmetricTridiagonal& t, int index);

// Solve (T - shift I) x = b by Gaussian elimination with partial pivoting.
std::vector<double> solve_shifted(const SymmetricTridiagonal& t, double shift, std::vector<double> b);

struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;  // unit norm
    double residual = 0.0;       // ||T v - value v||
};

// Inverse iteration for the eigenvector of a known eigenvalue, orthogonalized
// against `previous` (used for a degenerate partner).
EigenPair inverse_iteration(const SymmetricTridiagonal& t, double value,
                            const std::vector<std::vector<double>>& previous = {});

}  // namespace polariton
