#pragma once

// Quasi-energies of the quantized resonance Hamiltonian
//
//     E_k = (N^2 zeta hbar^2 / 8) a_{nu(k)}(q) - omega^2 / (2 zeta) + H0,
//     q = 4 lambda V / (N^2 zeta hbar^2),   nu(k) = 2k/N + 2 omega / (N zeta hbar).
//
// Labels follow the Fourier ladder of the pi-periodic basis: k = N m.

#include "qrecur/mathieu.hpp"
#include "qrecur/resonance_model.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace qrecur {

double mathieu_q(const ResonanceParams& p);
double order_at(const ResonanceParams& p, double k);
inline double base_order(const ResonanceParams& p) { return order_at(p, 0.0); }

// Real k is accepted so that derivatives in k can be taken numerically.
// Throws UnsupportedRegimeError for zeta = 0 and DegeneracyError (with
// candidate energies) when the Mathieu branch is ambiguous.
double quasienergy(const ResonanceParams& p, double k, const MathieuOptions& options = {});

struct SpectrumEntry {
    int m = 0;
    double k = 0.0;
    double nu = 0.0;
    double E = 0.0;
};

// A label whose branch could not be resolved; both candidate energies kept.
struct SpectrumFailure {
    int m = 0;
    double k = 0.0;
    double nu = 0.0;
    std::vector<double> candidates;
    std::string message;
};

struct Spectrum {
    ResonanceParams params;
    double q = 0.0;
    double nu0 = 0.0;
    std::map<int, SpectrumEntry> entries;
    std::vector<SpectrumFailure> failures;
};

Spectrum build_spectrum(const ResonanceParams& p, int m_range, const MathieuOptions& options = {});

// Columns: m,k,nu,E,degenerate. Degenerate rows leave E empty and list both
// candidate energies separated by ';'.
void write_spectrum_csv(std::ostream& out, const Spectrum& s);

}  // namespace qrecur
