#include "qrecur/spectrum.hpp"

#include "qrecur/errors.hpp"
#include "qrecur/numfmt.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <ostream>

namespace qrecur {

namespace {

void require_mathieu_form(const ResonanceParams& p) {
    p.validate();
    if (p.zeta == 0.0) {
        throw UnsupportedRegimeError(
            "zeta = 0 has no Mathieu form; the linear (case a) regime is handled by the time-scale "
            "closed forms");
    }
}

double energy_scale(const ResonanceParams& p) {
    return p.N * p.N * p.zeta * p.hbar * p.hbar / 8.0;
}

// E from the shift a - nu^2, using nu^2 - nu0^2 = d (d + 2 nu0) with d = 2k/N.
double energy_from_shift(const ResonanceParams& p, double k, double shift) {
    const double d = 2.0 * k / p.N;
    return energy_scale(p) * (shift + d * (d + 2.0 * base_order(p))) + p.H0;
}

}  // namespace

double mathieu_q(const ResonanceParams& p) {
    return 4.0 * p.coupling() / (p.N * p.N * p.zeta * p.hbar * p.hbar);
}

double order_at(const ResonanceParams& p, double k) {
    return 2.0 * k / p.N + 2.0 * p.omega / (p.N * p.zeta * p.hbar);
}

double quasienergy(const ResonanceParams& p, double k, const MathieuOptions& options) {
    require_mathieu_form(p);
    const double nu = order_at(p, k);
    try {
        const MathieuValue v = characteristic_value(nu, mathieu_q(p), options);
        return energy_from_shift(p, k, v.shift);
    } catch (const DegeneracyError& e) {
        const double nu2 = nu * nu;
        const double lo = energy_from_shift(p, k, e.candidates()[0] - nu2);
        const double hi = energy_from_shift(p, k, e.candidates()[1] - nu2);
        throw DegeneracyError(fmt::format("quasi-energy at k = {} is ambiguous: {}", k, e.what()), lo,
                              hi);
    }
}

Spectrum build_spectrum(const ResonanceParams& p, int m_range, const MathieuOptions& options) {
    if (m_range < 1) throw RangeError("m_range must be >= 1");
    require_mathieu_form(p);
    Spectrum s;
    s.params = p;
    s.q = mathieu_q(p);
    s.nu0 = base_order(p);
    for (int m = -m_range; m <= m_range; ++m) {
        const double k = static_cast<double>(p.N) * m;
        const double nu = order_at(p, k);
        try {
            s.entries.emplace(m, SpectrumEntry{m, k, nu, quasienergy(p, k, options)});
        } catch (const DegeneracyError& e) {
            s.failures.push_back(SpectrumFailure{m, k, nu, e.candidates(), e.what()});
        }
    }
    return s;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
    fmt::print(out, "# q = {}\n# nu0 = {}\n", num(s.q), num(s.nu0));
    fmt::print(out, "m,k,nu,E,degenerate\n");
    const int m_range = [&] {
        int r = 0;
        for (const auto& [m, e] : s.entries) r = std::max(r, std::abs(m));
        for (const auto& f : s.failures) r = std::max(r, std::abs(f.m));
        return r;
    }();
    for (int m = -m_range; m <= m_range; ++m) {
        if (auto it = s.entries.find(m); it != s.entries.end()) {
            const auto& e = it->second;
            fmt::print(out, "{},{},{},{},\n", m, num(e.k), num(e.nu), num(e.E));
            continue;
        }
        for (const auto& f : s.failures) {
            if (f.m != m) continue;
            fmt::print(out, "{},{},{},,{};{}\n", m, num(f.k), num(f.nu), num(f.candidates[0]),
                       num(f.candidates[1]));
        }
    }
}

}  // namespace qrecur
