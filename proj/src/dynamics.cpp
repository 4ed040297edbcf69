#include "qrecur/dynamics.hpp"

#include "qrecur/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qrecur {

namespace {

// Gaussian weight at the basis edge must sit below this fraction of the peak.
constexpr double kEdgeWeight = 1e-8;

}  // namespace

SymTridiagonal build_hamiltonian_matrix(const ResonanceParams& p, int half_bandwidth) {
    p.validate();
    if (half_bandwidth < 4) throw RangeError("half-bandwidth must be >= 4");
    const auto n = static_cast<std::size_t>(2 * half_bandwidth + 1);
    const double kinetic = 0.5 * p.N * p.N * p.zeta * p.hbar * p.hbar;
    const double linear = p.hbar * p.N * p.omega;
    SymTridiagonal h;
    h.diag.resize(n);
    h.off.assign(n - 1, 0.5 * p.coupling());
    for (std::size_t r = 0; r < n; ++r) {
        const double m = static_cast<double>(static_cast<int>(r) - half_bandwidth);
        h.diag[r] = kinetic * m * m + linear * m + p.H0;
    }
    return h;
}

int suggested_half_bandwidth(const WavePacketSpec& packet) {
    const double reach = packet.sigma_m * std::sqrt(-2.0 * std::log(kEdgeWeight));
    return std::max(4, static_cast<int>(std::floor(std::abs(packet.mean_m) + reach)) + 1);
}

Eigen::VectorXcd packet_coefficients(const WavePacketSpec& packet, int half_bandwidth) {
    if (!(packet.sigma_m > 0.0)) throw RangeError("packet sigma_m must be > 0");
    const double sigma2 = packet.sigma_m * packet.sigma_m;
    auto weight = [&](double m) {
        const double x = m - packet.mean_m;
        return std::exp(-x * x / (2.0 * sigma2));
    };
    const double M = half_bandwidth;
    if (std::abs(packet.mean_m) >= M || weight(M) >= kEdgeWeight || weight(-M) >= kEdgeWeight) {
        const int suggested = suggested_half_bandwidth(packet);
        throw BasisSizeError(fmt::format("packet (mean {}, sigma {}) is not contained in the basis "
                                         "|m| <= {}; use a half-bandwidth of at least {}",
                                         packet.mean_m, packet.sigma_m, half_bandwidth, suggested),
                             suggested);
    }
    const auto n = static_cast<Eigen::Index>(2 * half_bandwidth + 1);
    Eigen::VectorXcd c(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const double m = static_cast<double>(r - half_bandwidth);
        // Amplitude is the square root of the Gaussian weight.
        c(r) = std::polar(std::sqrt(weight(m)), 2.0 * m * packet.theta0);
    }
    c /= c.norm();
    return c;
}

ResonancePropagator::ResonancePropagator(const ResonanceParams& p, int half_bandwidth)
    : params_(p), half_bandwidth_(half_bandwidth) {
    const SymTridiagonal h = build_hamiltonian_matrix(p, half_bandwidth);
    const auto n = static_cast<Eigen::Index>(h.size());
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(h.diag.data(), n);
    Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(h.off.data(), n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw NumericalQualityError("diagonalization of the resonance Hamiltonian failed", 0.0);
    }
    energies_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
}

int ResonancePropagator::dominant_index(Eigen::Index j) const {
    Eigen::Index row = 0;
    vectors_.col(j).cwiseAbs().maxCoeff(&row);
    return static_cast<int>(row) - half_bandwidth_;
}

Eigen::VectorXcd ResonancePropagator::propagate(const Eigen::VectorXcd& psi, double t) const {
    Eigen::VectorXcd b = vectors_.transpose().cast<std::complex<double>>() * psi;
    for (Eigen::Index j = 0; j < b.size(); ++j) {
        b(j) *= std::polar(1.0, -energies_(j) * t / params_.hbar);
    }
    return vectors_.cast<std::complex<double>>() * b;
}

AutocorrTrace ResonancePropagator::autocorrelation(const Eigen::VectorXcd& psi0, double dt,
                                                   int steps) const {
    if (!(dt > 0.0)) throw RangeError("dt must be > 0");
    if (steps < 0) throw RangeError("steps must be >= 0");
    const Eigen::MatrixXcd U = vectors_.cast<std::complex<double>>();
    const Eigen::VectorXcd b = U.transpose() * psi0;
    const Eigen::VectorXd w = b.cwiseAbs2();

    AutocorrTrace trace;
    trace.dt = dt;
    trace.meta.params = params_;
    trace.meta.half_bandwidth = half_bandwidth_;
    trace.values.reserve(static_cast<std::size_t>(steps) + 1);
    Eigen::VectorXcd phased(b.size());
    double drift = 0.0;
    for (int s = 0; s <= steps; ++s) {
        const double t = dt * s;
        std::complex<double> c{0.0, 0.0};
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            const std::complex<double> ph = std::polar(1.0, -energies_(j) * t / params_.hbar);
            c += w(j) * ph;
            phased(j) = b(j) * ph;
        }
        trace.values.push_back(std::norm(c));
        drift = std::max(drift, std::abs((U * phased).squaredNorm() - 1.0));
    }
    trace.meta.norm_drift = drift;
    return trace;
}

AutocorrTrace evolve(const ResonanceParams& p, const WavePacketSpec& packet, double dt, int steps,
                     int half_bandwidth) {
    const Eigen::VectorXcd psi0 = packet_coefficients(packet, half_bandwidth);
    const ResonancePropagator prop(p, half_bandwidth);
    AutocorrTrace trace = prop.autocorrelation(psi0, dt, steps);
    trace.meta.packet = packet;
    return trace;
}

HarmonicCenter resonance_center_mode(const ResonanceParams& p) {
    p.validate();
    HarmonicCenter h;
    h.quantum_recurrence = std::numeric_limits<double>::infinity();
    const double product = p.zeta * p.coupling();
    if (!(product > 0.0)) {
        h.unstable = true;
        h.frequency = std::numeric_limits<double>::quiet_NaN();
        h.period = std::numeric_limits<double>::quiet_NaN();
        return h;
    }
    h.frequency = p.N * std::sqrt(product);
    h.period = 2.0 * std::acos(-1.0) / h.frequency;
    return h;
}

LevelSpacingReport level_spacing_report(const ResonanceParams& p, int count, int half_bandwidth) {
    p.validate();
    if (count < 2) throw RangeError("level_spacing_report needs count >= 2");
    LevelSpacingReport report;
    if (!(p.zeta > 0.0) || p.coupling() == 0.0) {
        report.shortfall = true;
        return report;
    }
    const double nu0 = 2.0 * p.omega / (p.N * p.zeta * p.hbar);
    const double q = 4.0 * std::abs(p.coupling()) / (p.N * p.N * p.zeta * p.hbar * p.hbar);
    if (half_bandwidth <= 0) {
        half_bandwidth = std::max(64, static_cast<int>(std::ceil(std::abs(nu0) / 2.0 +
                                                                 4.0 * std::sqrt(q))) + 32);
    }
    const ResonancePropagator prop(p, half_bandwidth);
    // Kinetic minimum sits at m = -nu0/2, where the diagonal equals H0 - omega^2/(2 zeta).
    const double barrier = p.H0 - p.omega * p.omega / (2.0 * p.zeta) + std::abs(p.coupling());
    for (Eigen::Index j = 0; j < prop.energies().size(); ++j) {
        if (prop.energies()(j) >= barrier) break;
        ++report.bound_states;
        if (static_cast<int>(report.levels.size()) < count + 1) {
            report.levels.push_back(prop.energies()(j));
        }
    }
    for (std::size_t i = 1; i < report.levels.size(); ++i) {
        report.gaps.push_back(report.levels[i] - report.levels[i - 1]);
    }
    report.shortfall = report.bound_states < count + 1;
    return report;
}

}  // namespace qrecur
