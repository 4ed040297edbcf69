#include "qrecur/resonance_model.hpp"

#include "qrecur/errors.hpp"
#include "qrecur/richardson.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

namespace qrecur {

void ResonanceParams::validate() const {
    if (!(hbar > 0.0)) throw RangeError(fmt::format("hbar must be > 0 (got {})", hbar));
    if (N < 1) throw RangeError(fmt::format("resonance order N must be >= 1 (got {})", N));
    if (!(lambda >= 0.0)) throw RangeError(fmt::format("lambda must be >= 0 (got {})", lambda));
    if (M && std::gcd(std::abs(*M), N) != 1) {
        throw RangeError(fmt::format("M = {} is not co-prime to N = {}", *M, N));
    }
    for (double v : {omega, zeta, lambda, V, hbar, H0, I0}) {
        if (!std::isfinite(v)) throw RangeError("resonance parameters must be finite");
    }
}

// ---------------------------------------------------------------------------
// FrequencyCurve

FrequencyCurve::FrequencyCurve(std::vector<std::pair<double, double>> samples, CurveKind kind)
    : kind_(kind) {
    if (samples.size() < 4) {
        throw InputShapeError(fmt::format("curve needs at least 4 samples, got {}", samples.size()));
    }
    actions_.reserve(samples.size());
    values_.reserve(samples.size());
    for (const auto& [a, v] : samples) {
        if (!std::isfinite(a) || !std::isfinite(v)) throw InputShapeError("non-finite curve sample");
        if (!actions_.empty() && !(a > actions_.back())) {
            throw InputShapeError("curve actions must be strictly increasing");
        }
        actions_.push_back(a);
        values_.push_back(v);
    }

    // Natural spline: tridiagonal system for the interior second derivatives.
    const std::size_t n = actions_.size();
    second_.assign(n, 0.0);
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = actions_[i] - actions_[i - 1];
        const double h1 = actions_[i + 1] - actions_[i];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = 6.0 * ((values_[i + 1] - values_[i]) / h1 - (values_[i] - values_[i - 1]) / h0);
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
        const double lower = actions_[i] - actions_[i - 1];
        const double w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        second_[i] = (rhs[i] - upper[i] * second_[i + 1]) / diag[i];
        if (i == 1) break;
    }
}

double FrequencyCurve::operator()(double action) const {
    if (action < actions_.front() || action > actions_.back()) {
        throw RangeError(fmt::format("action {} outside sampled range [{}, {}]", action,
                                     actions_.front(), actions_.back()));
    }
    auto it = std::upper_bound(actions_.begin(), actions_.end(), action);
    std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - actions_.begin()),
                                           actions_.size() - 1);
    std::size_t lo = hi - 1;
    const double h = actions_[hi] - actions_[lo];
    const double a = (actions_[hi] - action) / h;
    const double b = 1.0 - a;
    return a * values_[lo] + b * values_[hi] +
           ((a * a * a - a) * second_[lo] + (b * b * b - b) * second_[hi]) * h * h / 6.0;
}

FrequencyCurve FrequencyCurve::read(std::istream& in, CurveKind kind) {
    std::vector<std::pair<double, double>> samples;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double a = 0.0, v = 0.0;
        if (!(ls >> a)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw InputShapeError(fmt::format("line {}: expected 'action value'", lineno));
        }
        if (!(ls >> v)) throw InputShapeError(fmt::format("line {}: missing value column", lineno));
        std::string extra;
        if (ls >> extra) throw InputShapeError(fmt::format("line {}: more than two columns", lineno));
        samples.emplace_back(a, v);
    }
    return FrequencyCurve(std::move(samples), kind);
}

// ---------------------------------------------------------------------------
// Fourier amplitude

std::complex<double> coupling_fourier_amplitude(const AngleGrid& grid, std::pair<int, int> n) {
    if (grid.rows < 4 || grid.cols < 4) {
        throw InputShapeError(fmt::format("angle grid must be at least 4x4 (got {}x{})", grid.rows,
                                          grid.cols));
    }
    if (grid.values.size() != grid.rows * grid.cols) {
        throw InputShapeError(fmt::format("angle grid holds {} values, expected {}x{}",
                                          grid.values.size(), grid.rows, grid.cols));
    }
    const auto [n1, n2] = n;
    if (2 * static_cast<std::size_t>(std::abs(n1)) > grid.rows ||
        2 * static_cast<std::size_t>(std::abs(n2)) > grid.cols) {
        throw RangeError(fmt::format("harmonic ({}, {}) beyond the Nyquist range of a {}x{} grid", n1,
                                     n2, grid.rows, grid.cols));
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::complex<double> sum{0.0, 0.0};
    for (std::size_t i1 = 0; i1 < grid.rows; ++i1) {
        // Reduce the phase index modulo the grid size to keep the angle small.
        const long p1 = (static_cast<long>(i1) * n1) % static_cast<long>(grid.rows);
        for (std::size_t i2 = 0; i2 < grid.cols; ++i2) {
            const long p2 = (static_cast<long>(i2) * n2) % static_cast<long>(grid.cols);
            const double phase = two_pi * (static_cast<double>(p1) / static_cast<double>(grid.rows) +
                                           static_cast<double>(p2) / static_cast<double>(grid.cols));
            sum += grid.at(i1, i2) * std::polar(1.0, -phase);
        }
    }
    return sum / static_cast<double>(grid.rows * grid.cols);
}

// ---------------------------------------------------------------------------
// Resonance search

ResonanceSearch find_resonances(const FrequencyCurve& omega1, const FrequencyCurve& omega2,
                                std::pair<int, int> n) {
    const auto [n1, n2] = n;
    if (n1 == 0 && n2 == 0) throw RangeError("resonance vector (0, 0) is trivial");
    const double lo = std::max(omega1.front(), omega2.front());
    const double hi = std::min(omega1.back(), omega2.back());
    if (!(lo < hi)) throw RangeError("frequency curves share no common action interval");

    auto residual = [&](double I) { return n1 * omega1(I) + n2 * omega2(I); };

    // Scan at every node of either curve plus a few points per interval.
    std::vector<double> nodes;
    for (const auto* c : {&omega1, &omega2}) {
        for (double a : c->actions()) {
            if (a >= lo && a <= hi) nodes.push_back(a);
        }
    }
    nodes.push_back(lo);
    nodes.push_back(hi);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    constexpr int kSubdivisions = 4;
    std::vector<double> scan;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        for (int s = 0; s < kSubdivisions; ++s) {
            scan.push_back(nodes[i] + (nodes[i + 1] - nodes[i]) * s / kSubdivisions);
        }
    }
    scan.push_back(nodes.back());

    std::vector<double> r(scan.size());
    double rmax = 0.0;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        r[i] = residual(scan[i]);
        rmax = std::max(rmax, std::abs(r[i]));
    }
    ResonanceSearch out;
    if (rmax < 1e-12) {
        out.degenerate = true;
        return out;
    }

    for (std::size_t i = 0; i < scan.size(); ++i) {
        if (r[i] == 0.0) {
            out.roots.push_back(scan[i]);
            continue;
        }
        if (i + 1 == scan.size() || r[i + 1] == 0.0 || (r[i] > 0.0) == (r[i + 1] > 0.0)) continue;
        double a = scan[i], b = scan[i + 1];
        double ra = r[i];
        const double width_floor = 1e-3 * (hi - lo);
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            if (b - a <= 1e-10 * std::max(std::abs(mid), width_floor)) break;
            const double rm = residual(mid);
            if (rm == 0.0) {
                a = b = mid;
                break;
            }
            if ((rm > 0.0) == (ra > 0.0)) {
                a = mid;
                ra = rm;
            } else {
                b = mid;
            }
        }
        out.roots.push_back(0.5 * (a + b));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reduction

namespace detail {

RichardsonResult richardson_derivative(const std::function<double(double)>& f, double x0, double h,
                                       int order, int levels, double rel_tol, double abs_floor) {
    if (order != 1 && order != 2) throw RangeError("richardson_derivative supports order 1 or 2");
    if (levels < 2) throw RangeError("richardson_derivative needs at least 2 levels");
    std::vector<std::vector<double>> t(levels, std::vector<double>(levels, 0.0));
    const double f0 = order == 2 ? f(x0) : 0.0;
    for (int i = 0; i < levels; ++i) {
        const double step = h / std::pow(2.0, i);
        const double fp = f(x0 + step);
        const double fm = f(x0 - step);
        t[i][0] = order == 1 ? (fp - fm) / (2.0 * step) : (fp - 2.0 * f0 + fm) / (step * step);
        double factor = 1.0;
        for (int j = 1; j <= i; ++j) {
            factor *= 4.0;
            t[i][j] = t[i][j - 1] + (t[i][j - 1] - t[i - 1][j - 1]) / (factor - 1.0);
        }
    }
    const double best = t[levels - 1][levels - 1];
    const double change = std::abs(best - t[levels - 2][levels - 2]);
    if (change > std::max(rel_tol * std::abs(best), abs_floor)) {
        throw NumericalQualityError(
            fmt::format("derivative of order {} did not converge (successive Richardson levels "
                        "differ by {:.3e})",
                        order, change),
            best);
    }
    return {best, change};
}

}  // namespace detail

ResonanceParams reduce_to_resonance(const FrequencyCurve& h0, double I0,
                                    const CouplingSpec& coupling, double hbar) {
    if (h0.kind() != CurveKind::H0) throw InputShapeError("reduce_to_resonance needs an H0 curve");
    const auto& act = h0.actions();
    const auto& val = h0.values();
    const auto below = std::lower_bound(act.begin(), act.end(), I0) - act.begin();
    const auto above = act.end() - std::upper_bound(act.begin(), act.end(), I0);
    if (below < 2 || above < 2) {
        throw RangeError(fmt::format("I0 = {} needs at least 2 samples on each side", I0));
    }

    // Nearest sample, then the widest centred window up to 9 points.
    std::size_t c = static_cast<std::size_t>(below);
    if (c > 0 && std::abs(act[c - 1] - I0) <= std::abs(act[c] - I0)) --c;
    const std::size_t n = act.size();
    const std::size_t half = std::min<std::size_t>({4, c, n - 1 - c});
    if (half < 2) throw RangeError(fmt::format("I0 = {} too close to the sampled boundary", I0));
    const std::size_t first = c - half;
    const std::size_t count = 2 * half + 1;

    // Degree-4 least squares in the scaled variable x = (I - I0) / s.
    const double s = 0.5 * (act[first + count - 1] - act[first]);
    constexpr int kDegree = 4;
    Eigen::MatrixXd A(static_cast<Eigen::Index>(count), kDegree + 1);
    Eigen::VectorXd y(static_cast<Eigen::Index>(count));
    double fscale = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double x = (act[first + i] - I0) / s;
        double p = 1.0;
        for (int d = 0; d <= kDegree; ++d, p *= x) A(static_cast<Eigen::Index>(i), d) = p;
        y(static_cast<Eigen::Index>(i)) = val[first + i];
        fscale = std::max(fscale, std::abs(val[first + i]));
    }
    const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(y);
    auto poly = [&coef](double x) {
        double r = 0.0;
        for (int d = kDegree; d >= 0; --d) r = r * x + coef(d);
        return r;
    };

    // Differentiate in x, then rescale to action units.
    constexpr double kRelTol = 1e-6;
    constexpr double kFloor = 1e-10;
    const auto d1 = detail::richardson_derivative(poly, 0.0, 0.5, 1, 4, kRelTol, kFloor * fscale);
    const auto d2 = detail::richardson_derivative(poly, 0.0, 0.5, 2, 4, kRelTol, kFloor * fscale);

    ResonanceParams p;
    p.omega = d1.value / s;
    p.zeta = d2.value / (s * s);
    p.H0 = poly(0.0);
    p.I0 = I0;
    p.lambda = coupling.lambda;
    p.V = coupling.V;
    p.N = coupling.N;
    p.M = coupling.M;
    p.hbar = hbar;
    p.validate();
    return p;
}

}  // namespace qrecur
