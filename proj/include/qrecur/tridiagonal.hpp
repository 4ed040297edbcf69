#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace qrecur {

// Real symmetric tridiagonal matrix: diag has n entries, off has n - 1.
struct SymTridiagonal {
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const noexcept { return diag.size(); }
    Eigen::MatrixXd dense() const;
    double max_abs_row_sum() const noexcept;
};

struct TridiagonalEigen {
    std::vector<double> values;  // ascending
    // rows(r, j): component of eigenvector j on tracked row r.
    Eigen::MatrixXd rows;
};

// Implicit QL with Wilkinson shifts. Only the listed rows of the eigenvector
// matrix are accumulated, so memory stays O(n * tracked.size()).
TridiagonalEigen tridiagonal_eigen(const SymTridiagonal& t, std::span<const std::size_t> tracked);

// Unit eigenvector for an eigenvalue already computed to working precision,
// by inverse iteration (LAPACK stein).
Eigen::VectorXd tridiagonal_eigenvector(const SymTridiagonal& t, double eigenvalue);

}  // namespace qrecur
