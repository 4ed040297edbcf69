#pragma once

// Parameter records for a single isolated nonlinear resonance and the helpers
// that reduce a sampled two-degree-of-freedom description to them.

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace qrecur {

// Reduced one-resonance system. Every downstream module consumes this record.
struct ResonanceParams {
    double omega = 1.0;   // classical frequency at I0
    double zeta = 0.0;    // nonlinearity d2H0/dI2 at I0
    double lambda = 0.0;  // coupling strength, >= 0
    double V = 0.0;       // Fourier amplitude of the resonant coupling term
    int N = 1;            // resonance order
    std::optional<int> M; // co-prime partner, informational only
    double hbar = 1.0;
    double H0 = 0.0;      // reference energy H0(I0)
    double I0 = 0.0;      // mean action of the excitation

    // Throws RangeError when an invariant is broken.
    void validate() const;

    // Effective coupling lambda * V.
    double coupling() const noexcept { return lambda * V; }
};

enum class CurveKind { Omega1, Omega2, H0 };

// Tabulated function of the action. Actions are strictly increasing and there
// are at least four samples.
class FrequencyCurve {
public:
    FrequencyCurve(std::vector<std::pair<double, double>> samples, CurveKind kind);

    CurveKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return actions_.size(); }
    const std::vector<double>& actions() const noexcept { return actions_; }
    const std::vector<double>& values() const noexcept { return values_; }
    double front() const noexcept { return actions_.front(); }
    double back() const noexcept { return actions_.back(); }

    // Natural cubic spline through the samples. Outside the sampled range
    // throws RangeError.
    double operator()(double action) const;

    // Two-column text: action value. '#' starts a comment.
    static FrequencyCurve read(std::istream& in, CurveKind kind);

private:
    std::vector<double> actions_;
    std::vector<double> values_;
    std::vector<double> second_;  // spline second derivatives at the nodes
    CurveKind kind_;
};

// Values of the coupling Hamiltonian on a uniform (theta1, theta2) grid over
// [0, 2pi)^2, stored row-major: values[i1 * cols + i2].
struct AngleGrid {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    double at(std::size_t i1, std::size_t i2) const { return values[i1 * cols + i2]; }
};

// Discrete approximation of (2pi)^-2 * integral of H_c exp(-i n.theta).
std::complex<double> coupling_fourier_amplitude(const AngleGrid& grid, std::pair<int, int> n);

struct ResonanceSearch {
    std::vector<double> roots;
    bool degenerate = false;  // residual identically below 1e-12 on the interval
};

// Actions where n1*Omega1(I) + n2*Omega2(I) changes sign, refined by bisection.
ResonanceSearch find_resonances(const FrequencyCurve& omega1, const FrequencyCurve& omega2,
                                std::pair<int, int> n);

struct CouplingSpec {
    double lambda = 0.0;
    double V = 0.0;
    int N = 1;
    std::optional<int> M;
};

// Local Taylor data of H0 at I0 (omega, zeta and the interpolated H0).
ResonanceParams reduce_to_resonance(const FrequencyCurve& h0, double I0,
                                    const CouplingSpec& coupling, double hbar);

}  // namespace qrecur
