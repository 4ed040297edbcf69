#pragma once

// Wave-packet dynamics under the quantized resonance Hamiltonian in the
// pi-periodic Fourier basis exp(2 i m theta), m in [-M, M]:
//
//     H_mm      = (N^2 zeta hbar^2 / 2) m^2 + hbar N omega m + H0
//     H_m,m+-1  = lambda V / 2
//
// The action offset of ladder state m is I - I0 = N hbar m. Propagation is by
// exact eigenphases, so dt is only a sampling interval.

#include "qrecur/resonance_model.hpp"
#include "qrecur/tridiagonal.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace qrecur {

// Gaussian ladder weights |c_m|^2 ~ exp(-(m - mean_m)^2 / (2 sigma_m^2)), with
// the angle shift exp(2 i m theta0) applied to the amplitudes.
struct WavePacketSpec {
    double mean_m = 0.0;
    double sigma_m = 1.0;
    double theta0 = 0.0;
};

struct TraceMetadata {
    ResonanceParams params;
    WavePacketSpec packet;
    int half_bandwidth = 0;
    double norm_drift = 0.0;  // max | ||psi(t)||^2 - 1 | over the samples
};

struct AutocorrTrace {
    double dt = 0.0;
    std::vector<double> values;  // |C(j dt)|^2
    TraceMetadata meta;

    double t_max() const noexcept {
        return values.empty() ? 0.0 : dt * static_cast<double>(values.size() - 1);
    }
    double time(std::size_t j) const noexcept { return dt * static_cast<double>(j); }
};

SymTridiagonal build_hamiltonian_matrix(const ResonanceParams& p, int half_bandwidth);

// Normalized ladder amplitudes. Throws BasisSizeError when the Gaussian weight
// at m = +-M is not below 1e-8 of its peak.
Eigen::VectorXcd packet_coefficients(const WavePacketSpec& packet, int half_bandwidth);

// Smallest half-bandwidth that passes the truncation-safety check.
int suggested_half_bandwidth(const WavePacketSpec& packet);

// Eigendecomposition of the resonance Hamiltonian, reused for propagation.
class ResonancePropagator {
public:
    ResonancePropagator(const ResonanceParams& p, int half_bandwidth);

    int half_bandwidth() const noexcept { return half_bandwidth_; }
    const Eigen::VectorXd& energies() const noexcept { return energies_; }
    const Eigen::MatrixXd& eigenvectors() const noexcept { return vectors_; }

    // Fourier index of the largest component of eigenvector j.
    int dominant_index(Eigen::Index j) const;

    // psi(t) = U exp(-i E t / hbar) U^T psi.
    Eigen::VectorXcd propagate(const Eigen::VectorXcd& psi, double t) const;

    // Sampled |<psi0 | psi(j dt)>|^2; also records the norm drift.
    AutocorrTrace autocorrelation(const Eigen::VectorXcd& psi0, double dt, int steps) const;

private:
    ResonanceParams params_;
    int half_bandwidth_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXd vectors_;
};

AutocorrTrace evolve(const ResonanceParams& p, const WavePacketSpec& packet, double dt, int steps,
                     int half_bandwidth);

struct HarmonicCenter {
    double frequency = 0.0;  // N sqrt(zeta lambda V)
    double period = 0.0;
    double quantum_recurrence = 0.0;  // infinite: equally spaced levels
    bool unstable = false;            // zeta * lambda * V <= 0
};

HarmonicCenter resonance_center_mode(const ResonanceParams& p);

struct LevelSpacingReport {
    std::vector<double> levels;  // lowest well-bound eigenvalues used
    std::vector<double> gaps;
    int bound_states = 0;
    bool shortfall = false;  // fewer than count + 1 bound states
};

// Gaps between the lowest eigenvalues lying below the top of the cosine
// barrier. Uses the given half-bandwidth, or an automatic one when <= 0.
LevelSpacingReport level_spacing_report(const ResonanceParams& p, int count, int half_bandwidth = 0);

}  // namespace qrecur
