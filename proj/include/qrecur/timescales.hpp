#pragma once

// Classical period and quantum revival time of an excitation near the
// resonance, with their coupling-induced modification factors:
//
//     T_cl = (1 - M_cl) T0_cl,   T0_cl = 2 pi / omega
//     T_Q  = (1 - M_Q)  T0_Q,    T0_Q  = 4 pi / (hbar zeta)
//
// Closed forms come from second-order perturbation theory in q; the numeric
// variant differentiates the quasi-energy E_k in k.

#include "qrecur/mathieu.hpp"
#include "qrecur/resonance_model.hpp"

#include <limits>
#include <optional>
#include <string_view>

namespace qrecur {

enum class Regime { case_a, case_b, case_c, near_singular };
enum class TimeSource { closed_form, numeric_derivative, harmonic_center };

std::string_view to_string(Regime r);
std::string_view to_string(TimeSource s);

struct TimeScales {
    static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    double T0_cl = nan;
    double T0_Q = nan;
    double M_cl = nan;
    double M_Q = nan;
    double Tl_cl = nan;
    double Tl_Q = nan;
    double mu = nan;
    double alpha = nan;
    double beta = nan;
    Regime regime = Regime::case_b;
    TimeSource source = TimeSource::closed_form;

    bool open_system = false;         // omega = 0: classical period infinite
    bool negative_frequency = false;  // numeric omega1 <= 0, period sign kept
    bool unvalidated = false;         // zeta < 0: closed forms never validated there
    double omega1 = nan;              // numeric first-order frequency
    double omega2 = nan;              // numeric second-order frequency
};

// Base step in the label k for the numeric derivatives.
inline constexpr double kDefaultLabelStep = 1e-3;

// Below this |1 - mu^2| the regime is tagged near_singular.
inline constexpr double kNearSingular = 1e-6;

double mu_parameter(const ResonanceParams& p);
Regime classify(const ResonanceParams& p);

TimeScales closed_form_times(const ResonanceParams& p);

// Throws UnsupportedRegimeError for zeta = 0 and StencilError when a stencil
// point hits an ambiguous Mathieu branch.
// Without an explicit step the base step is stretched by the distance of nu0
// to the nearest pole nu = +-1 of the leading shift, when that exceeds 1.
double default_label_step(const ResonanceParams& p);
TimeScales numeric_times(const ResonanceParams& p, std::optional<double> step = std::nullopt,
                         const MathieuOptions& options = {});

// Times from given factors: Tl = (1 - M) T0.
TimeScales times_from_factors(double T0_cl, double T0_Q, double M_cl, double M_Q);

struct CaseResiduals {
    double r_b = 0.0;  // 3 Tl_cl / (4 T0_cl) + Tl_Q / (4 T0_Q) - 1
    double r_c = 0.0;  // Tl_cl / T0_cl - Tl_Q / T0_Q
};

CaseResiduals case_relations(const TimeScales& ts);

}  // namespace qrecur
