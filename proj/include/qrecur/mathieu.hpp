#pragma once

// Characteristic values a_nu(q) of the Mathieu equation
//
//     y'' + (a - 2 q cos 2 theta) y = 0
//
// for real, generally fractional, order nu. The Floquet solution
// exp(i nu theta) * sum_m c_m exp(2 i m theta) turns the equation into the
// symmetric tridiagonal eigenproblem
//
//     (nu + 2m)^2 c_m + q (c_{m-1} + c_{m+1}) = a c_m,    m in [-M, M].
//
// The branch returned is the one whose eigenvector carries the largest weight
// on m = 0, i.e. the branch that starts at a = nu^2 when q = 0.

#include "qrecur/tridiagonal.hpp"

#include <Eigen/Dense>

#include <vector>

namespace qrecur {

struct MathieuValue {
    double nu = 0.0;
    double q = 0.0;
    double a = 0.0;
    double shift = 0.0;      // a - nu^2, computed without cancellation
    int dominant_index = 0;  // m of the largest Fourier coefficient
    int truncation = 0;      // half-bandwidth M of the accepted solve
    double residual = 0.0;   // |a(M) - a(M/2)|
};

struct MathieuOptions {
    // Convergence target for |a(M) - a(M/2)|, relative to max(1, |a|).
    double tol = 1e-12;
    int max_half_bandwidth = 1 << 14;
};

MathieuValue characteristic_value(double nu, double q, const MathieuOptions& options);
inline MathieuValue characteristic_value(double nu, double q, double tol = 1e-12) {
    return characteristic_value(nu, q, MathieuOptions{tol, 1 << 14});
}

// Initial half-bandwidth: max(8, ceil(|nu|/2) + ceil(2 sqrt|q|)).
int initial_half_bandwidth(double nu, double q);

// Tridiagonal matrix of the truncated Floquet system. With `shifted`, nu^2 is
// subtracted from the diagonal exactly (entries 4m(m + nu)).
SymTridiagonal mathieu_matrix(double nu, double q, int half_bandwidth, bool shifted = false);

// Full dense eigendecomposition of the same truncated system, via LAPACK dsyev.
struct MathieuEigensystem {
    int half_bandwidth = 0;
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // unit columns; row r is Fourier index m = r - M

    int fourier_index(Eigen::Index row) const { return static_cast<int>(row) - half_bandwidth; }
    Eigen::Index row_of(int m) const { return m + half_bandwidth; }
    // Fourier index of the largest |component| of eigenvector j.
    int dominant_index(Eigen::Index j) const;
};

MathieuEigensystem characteristic_value_oracle(double nu, double q, int half_bandwidth);

}  // namespace qrecur
