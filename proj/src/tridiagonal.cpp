#include "qrecur/tridiagonal.hpp"

#include "qrecur/errors.hpp"

#include <fmt/format.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qrecur {

Eigen::MatrixXd SymTridiagonal::dense() const {
    const auto n = static_cast<Eigen::Index>(diag.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) = diag[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        m(i, i + 1) = m(i + 1, i) = off[static_cast<std::size_t>(i)];
    }
    return m;
}

double SymTridiagonal::max_abs_row_sum() const noexcept {
    double norm = 0.0;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        double r = std::abs(diag[i]);
        if (i > 0) r += std::abs(off[i - 1]);
        if (i < off.size()) r += std::abs(off[i]);
        norm = std::max(norm, r);
    }
    return norm;
}

TridiagonalEigen tridiagonal_eigen(const SymTridiagonal& t, std::span<const std::size_t> tracked) {
    const std::size_t n = t.size();
    if (n == 0) throw InputShapeError("empty tridiagonal matrix");
    if (t.off.size() + 1 != n) throw InputShapeError("off-diagonal must have n - 1 entries");

    std::vector<double> d = t.diag;
    std::vector<double> e(n, 0.0);
    std::copy(t.off.begin(), t.off.end(), e.begin());

    const auto nt = static_cast<Eigen::Index>(tracked.size());
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(nt, static_cast<Eigen::Index>(n));
    for (Eigen::Index r = 0; r < nt; ++r) {
        if (tracked[static_cast<std::size_t>(r)] >= n) throw RangeError("tracked row out of range");
        z(r, static_cast<Eigen::Index>(tracked[static_cast<std::size_t>(r)])) = 1.0;
    }

    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr int kMaxIterations = 60;
    const auto last = static_cast<long>(n) - 1;
    for (long l = 0; l <= last; ++l) {
        int iter = 0;
        long m = l;
        do {
            for (m = l; m < last; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m == l) break;
            if (iter++ == kMaxIterations) {
                throw NumericalQualityError("tridiagonal QL iteration did not converge", d[l]);
            }
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            long i = m - 1;
            bool underflow = false;
            for (; i >= l; --i) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for (Eigen::Index k = 0; k < nt; ++k) {
                    f = z(k, i + 1);
                    z(k, i + 1) = s * z(k, i) + c * f;
                    z(k, i) = c * z(k, i) - s * f;
                }
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        } while (m != l);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&d](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    TridiagonalEigen out;
    out.values.resize(n);
    out.rows.resize(nt, static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = d[order[j]];
        out.rows.col(static_cast<Eigen::Index>(j)) = z.col(static_cast<Eigen::Index>(order[j]));
    }
    return out;
}

Eigen::VectorXd tridiagonal_eigenvector(const SymTridiagonal& t, double eigenvalue) {
    const auto n = static_cast<lapack_int>(t.size());
    std::vector<double> d = t.diag;
    std::vector<double> e = t.off;
    e.push_back(0.0);
    // LAPACKE inspects all n entries of w, iblock and isplit.
    std::vector<double> w(static_cast<std::size_t>(n), eigenvalue);
    std::vector<lapack_int> iblock(static_cast<std::size_t>(n), 1);
    std::vector<lapack_int> isplit(static_cast<std::size_t>(n), n);
    Eigen::VectorXd z(n);
    lapack_int ifail = 0;
    const lapack_int info = LAPACKE_dstein(LAPACK_COL_MAJOR, n, d.data(), e.data(), 1, w.data(),
                                           iblock.data(), isplit.data(), z.data(), n, &ifail);
    if (info < 0) throw Error(fmt::format("dstein rejected argument {}", -info));
    if (info > 0) throw NumericalQualityError("inverse iteration did not converge", eigenvalue);
    return z;
}

}  // namespace qrecur
