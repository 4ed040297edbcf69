#include "qrecur/mathieu.hpp"

#include "qrecur/errors.hpp"

#include <fmt/format.h>
#include <lapacke.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace qrecur {

namespace {

// Two eigenvectors whose |c_0| differ by less than this are a branch tie.
constexpr double kWeightTie = 1e-6;

struct BranchSolve {
    double shift;
    double tie_tolerance;
    bool tied = false;
    double lo = 0.0;  // sorted shifts of the tied pair
    double hi = 0.0;
};

BranchSolve solve_branch(double nu, double q, int half_bandwidth) {
    const SymTridiagonal t = mathieu_matrix(nu, q, half_bandwidth, true);
    // At nonzero integer nu the reflection m -> -nu - m pairs m = 0 with m = -nu, so the even and
    // odd branches share the pair weight c_0^2 + c_{-nu}^2.
    const bool reflected = nu != 0.0 && q != 0.0 && std::nearbyint(nu) == nu;
    const long partner = static_cast<long>(half_bandwidth) - static_cast<long>(std::nearbyint(nu));
    const bool paired = reflected && partner >= 0 && partner < static_cast<long>(t.size());
    std::vector<std::size_t> tracked{static_cast<std::size_t>(half_bandwidth)};
    if (paired) tracked.push_back(static_cast<std::size_t>(partner));
    const TridiagonalEigen eig = tridiagonal_eigen(t, tracked);

    auto weight = [&](std::size_t j) {
        const auto c = static_cast<Eigen::Index>(j);
        return paired ? std::hypot(eig.rows(0, c), eig.rows(1, c)) : std::abs(eig.rows(0, c));
    };
    std::size_t best = 0, second = 0;
    double w_best = -1.0, w_second = -1.0;
    for (std::size_t j = 0; j < eig.values.size(); ++j) {
        const double w = weight(j);
        if (w > w_best) {
            second = best;
            w_second = w_best;
            best = j;
            w_best = w;
        } else if (w > w_second) {
            second = j;
            w_second = w;
        }
    }
    if (paired && std::abs(eig.rows(0, static_cast<Eigen::Index>(second))) >
                      std::abs(eig.rows(0, static_cast<Eigen::Index>(best)))) {
        std::swap(best, second);
    }

    const double s = eig.values[best];
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * t.max_abs_row_sum();
    BranchSolve out{s, noise};
    if (w_second >= 0.0 && (paired || w_best - w_second <= kWeightTie)) {
        const double s2 = eig.values[second];
        out.tied = true;
        out.lo = std::min(s, s2);
        out.hi = std::max(s, s2);
    }
    return out;
}


// Characteristic function of the m = 0 branch written as two continued
// fractions, s - q^2/(s - D_1 - q^2/(s - D_2 - ...)) - (same for m < 0),
// with D_m = 4m(m + nu). Unlike an eigensolver it resolves s relative to |s|.
double continued_fraction_residual(double nu, double q, int half_bandwidth, double s) {
    const double q2 = q * q;
    double up = 0.0, down = 0.0;
    for (int j = half_bandwidth; j >= 1; --j) {
        up = q2 / (s - 4.0 * j * (j + nu) - up);
        down = q2 / (s - 4.0 * j * (j - nu) - down);
    }
    return s - up - down;
}

// Secant polish of an eigensolver shift. Kept only if it stays inside the
// eigensolver's own error bound.
double polish_shift(double nu, double q, int half_bandwidth, double s0, double bound) {
    auto f = [&](double s) { return continued_fraction_residual(nu, q, half_bandwidth, s); };
    double a = s0, fa = f(a);
    double b = s0 + bound, fb = f(b);
    for (int it = 0; it < 30 && std::isfinite(fb); ++it) {
        if (fb == 0.0 || fb == fa) break;
        const double c = b - fb * (b - a) / (fb - fa);
        a = b;
        fa = fb;
        b = c;
        fb = f(b);
        if (std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(b)) break;
    }
    return std::isfinite(b) && std::abs(b - s0) <= 4.0 * bound ? b : s0;
}

}  // namespace

int initial_half_bandwidth(double nu, double q) {
    const int from_order = static_cast<int>(std::ceil(std::abs(nu) / 2.0));
    const int from_q = static_cast<int>(std::ceil(2.0 * std::sqrt(std::abs(q))));
    return std::max(8, from_order + from_q);
}

SymTridiagonal mathieu_matrix(double nu, double q, int half_bandwidth, bool shifted) {
    if (half_bandwidth < 1) throw RangeError("half-bandwidth must be positive");
    const auto n = static_cast<std::size_t>(2 * half_bandwidth + 1);
    SymTridiagonal t;
    t.diag.resize(n);
    t.off.assign(n - 1, q);
    for (std::size_t r = 0; r < n; ++r) {
        const double m = static_cast<double>(static_cast<int>(r) - half_bandwidth);
        t.diag[r] = shifted ? 4.0 * m * (m + nu) : (nu + 2.0 * m) * (nu + 2.0 * m);
    }
    return t;
}

MathieuValue characteristic_value(double nu, double q, const MathieuOptions& options) {
    if (!(options.tol > 0.0)) throw RangeError("Mathieu tolerance must be > 0");
    if (!std::isfinite(nu) || !std::isfinite(q)) throw RangeError("nu and q must be finite");

    int M = initial_half_bandwidth(nu, q);
    if (M > options.max_half_bandwidth) {
        throw ResourceError(fmt::format("initial half-bandwidth {} exceeds the limit {}", M,
                                        options.max_half_bandwidth),
                            nu * nu);
    }
    BranchSolve prev = solve_branch(nu, q, M);
    for (;;) {
        const int next = 2 * M;
        if (next > options.max_half_bandwidth) {
            throw ResourceError(fmt::format("Mathieu truncation did not converge for nu = {}, q = {} "
                                            "before half-bandwidth {}",
                                            nu, q, options.max_half_bandwidth),
                                nu * nu + prev.shift);
        }
        const BranchSolve cur = solve_branch(nu, q, next);
        const double a = nu * nu + cur.shift;
        // A tied pair may swap order between truncations; converge on the pair instead.
        const double residual = cur.tied && prev.tied
                                    ? std::max(std::abs(cur.lo - prev.lo), std::abs(cur.hi - prev.hi))
                                    : std::abs(cur.shift - prev.shift);
        const double target = std::max(options.tol * std::max(1.0, std::abs(a)), cur.tie_tolerance);
        if (residual <= target) {
            if (cur.tied && cur.hi - cur.lo > target) {
                const double lo = nu * nu + cur.lo;
                const double hi = nu * nu + cur.hi;
                throw DegeneracyError(
                    fmt::format("Mathieu branch for nu = {}, q = {} is ambiguous: candidates {:.17g} "
                                "and {:.17g} share the m = 0 weight",
                                nu, q, lo, hi),
                    lo, hi);
            }
            const double shift =
                q == 0.0 ? cur.shift : polish_shift(nu, q, next, cur.shift, cur.tie_tolerance);
            MathieuValue v;
            v.nu = nu;
            v.q = q;
            v.a = nu * nu + shift;
            v.shift = shift;
            v.truncation = next;
            v.residual = residual;
            if (q == 0.0) {
                v.dominant_index = 0;
            } else {
                const SymTridiagonal t = mathieu_matrix(nu, q, next, true);
                const Eigen::VectorXd vec = tridiagonal_eigenvector(t, shift);
                Eigen::Index row = 0;
                vec.cwiseAbs().maxCoeff(&row);
                v.dominant_index = static_cast<int>(row) - next;
            }
            return v;
        }
        prev = cur;
        M = next;
    }
}

int MathieuEigensystem::dominant_index(Eigen::Index j) const {
    Eigen::Index row = 0;
    vectors.col(j).cwiseAbs().maxCoeff(&row);
    return fourier_index(row);
}

MathieuEigensystem characteristic_value_oracle(double nu, double q, int half_bandwidth) {
    if (half_bandwidth < 4) throw RangeError("oracle half-bandwidth must be >= 4");
    const SymTridiagonal t = mathieu_matrix(nu, q, half_bandwidth, false);
    MathieuEigensystem out;
    out.half_bandwidth = half_bandwidth;
    out.vectors = t.dense();
    const auto n = static_cast<lapack_int>(t.size());
    out.values.resize(n);
    const lapack_int info =
        LAPACKE_dsyev(LAPACK_COL_MAJOR, 'V', 'U', n, out.vectors.data(), n, out.values.data());
    if (info != 0) throw NumericalQualityError(fmt::format("dsyev failed (info = {})", info), 0.0);
    return out;
}

}  // namespace qrecur
