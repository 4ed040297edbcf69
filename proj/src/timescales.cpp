#include "qrecur/timescales.hpp"

#include "qrecur/errors.hpp"
#include "qrecur/spectrum.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace qrecur {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double scaled(double M, double T0) { return std::isinf(T0) ? T0 : (1.0 - M) * T0; }

// Fields shared by both variants: T0 values, mu, alpha, beta, regime and flags.
TimeScales base_times(const ResonanceParams& p) {
    p.validate();
    TimeScales ts;
    ts.T0_cl = p.omega == 0.0 ? kInf : kTwoPi / p.omega;
    ts.T0_Q = p.zeta == 0.0 ? kInf : 2.0 * kTwoPi / (p.hbar * p.zeta);
    ts.mu = mu_parameter(p);
    ts.regime = classify(p);
    ts.open_system = p.omega == 0.0;
    ts.unvalidated = p.zeta < 0.0;

    const double g = p.coupling() * p.zeta;
    if (g == 0.0) {
        ts.alpha = 0.0;
    } else {
        ts.alpha = p.omega == 0.0 ? kInf : 0.5 * std::pow(g / (p.omega * p.omega), 2);
    }
    if (p.zeta == 0.0) {
        ts.beta = p.coupling() == 0.0 ? 0.0 : kInf;
    } else {
        ts.beta = 0.5 * std::pow(4.0 * p.coupling() / (p.N * p.N * p.zeta * p.hbar * p.hbar), 2);
    }
    return ts;
}

}  // namespace

std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::case_a: return "case_a";
        case Regime::case_b: return "case_b";
        case Regime::case_c: return "case_c";
        case Regime::near_singular: return "near_singular";
    }
    return "unknown";
}

std::string_view to_string(TimeSource s) {
    switch (s) {
        case TimeSource::closed_form: return "closed_form";
        case TimeSource::numeric_derivative: return "numeric_derivative";
        case TimeSource::harmonic_center: return "harmonic_center";
    }
    return "unknown";
}

double mu_parameter(const ResonanceParams& p) {
    if (p.omega == 0.0) return p.zeta == 0.0 ? 0.0 : kInf;
    return p.N * p.hbar * p.zeta / (2.0 * p.omega);
}

Regime classify(const ResonanceParams& p) {
    if (p.zeta == 0.0) return Regime::case_a;
    const double mu = std::abs(mu_parameter(p));
    if (std::isinf(mu)) return Regime::case_c;
    if (std::abs(1.0 - mu * mu) < kNearSingular) return Regime::near_singular;
    return mu < 1.0 ? Regime::case_b : Regime::case_c;
}

TimeScales closed_form_times(const ResonanceParams& p) {
    TimeScales ts = base_times(p);
    ts.source = TimeSource::closed_form;
    if (p.zeta == 0.0) {
        ts.M_cl = 0.0;
        ts.M_Q = 0.0;
    } else {
        // Written over omega^2 - c^2 with c = N hbar zeta / 2 so that omega -> 0
        // reaches the case c limit (both factors -> -beta) without dividing by zero.
        const double c = 0.5 * p.N * p.hbar * p.zeta;
        const double w2 = p.omega * p.omega;
        const double D = w2 - c * c;
        const double g2 = std::pow(p.coupling() * p.zeta, 2);
        if (g2 == 0.0) {
            ts.M_cl = 0.0;
            ts.M_Q = 0.0;
        } else {
            ts.M_cl = -0.5 * g2 / (D * D);
            ts.M_Q = 0.5 * g2 * (3.0 * w2 + c * c) / (D * D * D);
        }
    }
    ts.Tl_cl = scaled(ts.M_cl, ts.T0_cl);
    ts.Tl_Q = scaled(ts.M_Q, ts.T0_Q);
    return ts;
}

double default_label_step(const ResonanceParams& p) {
    if (p.zeta == 0.0) return kDefaultLabelStep;
    const double nu0 = base_order(p);
    const double reach = std::min(std::abs(nu0 - 1.0), std::abs(nu0 + 1.0));
    return kDefaultLabelStep * std::max(1.0, reach);
}

TimeScales numeric_times(const ResonanceParams& p, std::optional<double> label_step,
                         const MathieuOptions& options) {
    if (label_step && !(*label_step > 0.0)) throw RangeError("label step must be > 0");
    TimeScales ts = base_times(p);
    ts.source = TimeSource::numeric_derivative;
    if (p.zeta == 0.0) {
        throw UnsupportedRegimeError("numeric time scales need zeta != 0 (case a has no Mathieu form)");
    }
    const double step = label_step.value_or(default_label_step(p));

    // E_k = scale (s(k) + d(d + 2 nu0)) + const with d = 2k/N and s = a - nu^2. The polynomial
    // part is differentiated exactly (central differences are exact on it), which leaves
    // omega1 - omega and omega2 - hbar zeta / 2 as pure differences of the small shift s.
    const double q = mathieu_q(p);
    auto shift = [&](double k) {
        try {
            return characteristic_value(order_at(p, k), q, options).shift;
        } catch (const DegeneracyError& e) {
            const std::string advice = k == 0.0
                                           ? "the centre label itself is degenerate; unresolvable"
                                           : "retry with a smaller step";
            throw StencilError(fmt::format("branch degeneracy inside the derivative stencil at k = {} "
                                           "({}): {}",
                                           k, advice, e.what()),
                               e.best_estimate());
        }
    };
    const double s_zero = shift(0.0);
    const double s_minus = shift(-step), s_plus = shift(step);
    const double s_minus2 = shift(-0.5 * step), s_plus2 = shift(0.5 * step);

    // Central differences at steps h and h/2, combined to cancel the h^2 error term.
    const double scale = p.N * p.N * p.zeta * p.hbar * p.hbar / 8.0;
    const double h2 = 0.5 * step;
    const double first_h = (s_plus - s_minus) / (2.0 * step);
    const double first_h2 = (s_plus2 - s_minus2) / (2.0 * h2);
    const double second_h = (s_plus - 2.0 * s_zero + s_minus) / (step * step);
    const double second_h2 = (s_plus2 - 2.0 * s_zero + s_minus2) / (h2 * h2);
    const double d1 = scale * (4.0 * first_h2 - first_h) / (3.0 * p.hbar);
    const double d2 = scale * (4.0 * second_h2 - second_h) / (6.0 * p.hbar);
    const double revival0 = 0.5 * p.hbar * p.zeta;
    ts.omega1 = p.omega + d1;
    ts.omega2 = revival0 + d2;
    ts.negative_frequency = ts.omega1 <= 0.0;
    ts.Tl_cl = kTwoPi / ts.omega1;
    ts.Tl_Q = kTwoPi / ts.omega2;
    // M = 1 - Tl/T0 = (omega_i - omega_i^(0)) / omega_i, with the difference taken exactly.
    ts.M_cl = ts.open_system ? TimeScales::nan : d1 / ts.omega1;
    ts.M_Q = d2 / ts.omega2;
    return ts;
}

TimeScales times_from_factors(double T0_cl, double T0_Q, double M_cl, double M_Q) {
    TimeScales ts;
    ts.T0_cl = T0_cl;
    ts.T0_Q = T0_Q;
    ts.M_cl = M_cl;
    ts.M_Q = M_Q;
    ts.Tl_cl = scaled(M_cl, T0_cl);
    ts.Tl_Q = scaled(M_Q, T0_Q);
    return ts;
}

CaseResiduals case_relations(const TimeScales& ts) {
    const double x = ts.Tl_cl / ts.T0_cl;
    const double y = ts.Tl_Q / ts.T0_Q;
    return {0.75 * x + 0.25 * y - 1.0, x - y};
}

}  // namespace qrecur
