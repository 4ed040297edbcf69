#include "qrecur/analysis.hpp"

#include "qrecur/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qrecur {

namespace {

double median(std::vector<double> v) {
    const std::size_t n = v.size();
    std::sort(v.begin(), v.end());
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Non-finite values are written as the strings "inf", "-inf" and "nan".
nlohmann::json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

nlohmann::json optional_number(const std::optional<double>& x) {
    return x ? number(*x) : nlohmann::json(nullptr);
}

Peak refine(const AutocorrTrace& trace, std::size_t i) {
    const Peak v = parabolic_vertex(trace.values[i - 1], trace.values[i], trace.values[i + 1]);
    return {trace.time(i) + v.time * trace.dt, std::min(v.height, 1.0)};
}

}  // namespace

Peak parabolic_vertex(double left, double centre, double right) {
    const double curvature = left - 2.0 * centre + right;
    if (curvature == 0.0) return {0.0, centre};
    const double offset = 0.5 * (left - right) / curvature;
    return {offset, centre - 0.25 * (left - right) * offset};
}

std::vector<Peak> detect_peaks(const AutocorrTrace& trace, double threshold) {
    if (trace.values.empty()) throw RangeError("empty trace");
    if (!(threshold > 0.0 && threshold < 1.0)) throw RangeError("threshold must lie in (0, 1)");
    std::vector<Peak> peaks;
    const auto& y = trace.values;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (y[i] > y[i - 1] && y[i] > y[i + 1] && y[i] > threshold) {
            peaks.push_back(refine(trace, i));
        }
    }
    return peaks;
}

TimeScales harmonic_center_times(const ResonanceParams& p) {
    const HarmonicCenter h = resonance_center_mode(p);
    if (h.unstable) throw RangeError("resonance centre is unstable (zeta * lambda * V <= 0)");
    TimeScales ts = times_from_factors(h.period, h.quantum_recurrence, 0.0, 0.0);
    ts.mu = mu_parameter(p);
    ts.regime = classify(p);
    ts.source = TimeSource::harmonic_center;
    ts.omega1 = h.frequency;
    return ts;
}

RecurrenceReport extract_times(const AutocorrTrace& trace, const TimeScales& predicted,
                               double threshold) {
    const double period = predicted.Tl_cl;
    if (!std::isfinite(period) || !(period > 0.0)) {
        throw ClassicalPeriodUnresolved("predicted classical period is not a positive finite time");
    }
    if (trace.t_max() < 3.0 * period) {
        throw ClassicalPeriodUnresolved(fmt::format(
            "trace covers {} time units, fewer than three predicted periods ({})", trace.t_max(),
            3.0 * period));
    }

    RecurrenceReport report;
    report.predicted = predicted;
    report.peaks = detect_peaks(trace, threshold);

    // Spacings from t = 0 through 5.5 predicted periods.
    std::vector<double> early{0.0};
    for (const auto& p : report.peaks) {
        if (p.time <= 5.5 * period) early.push_back(p.time);
    }
    if (early.size() < 3) {
        throw ClassicalPeriodUnresolved(fmt::format(
            "found {} recurrence peaks above {} in the first five periods, need 2", early.size() - 1,
            threshold));
    }
    std::vector<double> spacing;
    for (std::size_t i = 1; i < early.size(); ++i) spacing.push_back(early[i] - early[i - 1]);
    report.measured_Tcl = median(spacing);
    report.deviation_Tcl = report.measured_Tcl / period - 1.0;

    const double revival = predicted.Tl_Q;
    if (std::isfinite(revival) && revival > 0.0 && trace.t_max() >= 1.2 * revival) {
        const double plateau_lo = period;
        const double plateau_hi = 0.8 * revival;
        std::vector<double> middle;
        if (plateau_hi > plateau_lo) {
            const double third = (plateau_hi - plateau_lo) / 3.0;
            for (std::size_t j = 0; j < trace.values.size(); ++j) {
                const double t = trace.time(j);
                if (t >= plateau_lo + third && t <= plateau_lo + 2.0 * third) {
                    middle.push_back(trace.values[j]);
                }
            }
        }
        if (!middle.empty()) {
            report.collapse_plateau = median(std::move(middle));
            std::size_t best = 0;
            double height = -1.0;
            for (std::size_t j = 1; j + 1 < trace.values.size(); ++j) {
                const double t = trace.time(j);
                if (t < 0.8 * revival || t > 1.2 * revival) continue;
                if (trace.values[j] > height) {
                    height = trace.values[j];
                    best = j;
                }
            }
            if (best > 0 && height >= 2.0 * *report.collapse_plateau) {
                const Peak p = refine(trace, best);
                report.measured_TQ = p.time;
                report.deviation_TQ = p.time / revival - 1.0;
            }
        }
    }
    return report;
}

nlohmann::json to_json(const TimeScales& ts) {
    return {
        {"T0_cl", number(ts.T0_cl)},
        {"T0_Q", number(ts.T0_Q)},
        {"M_cl", number(ts.M_cl)},
        {"M_Q", number(ts.M_Q)},
        {"Tl_cl", number(ts.Tl_cl)},
        {"Tl_Q", number(ts.Tl_Q)},
        {"mu", number(ts.mu)},
        {"alpha", number(ts.alpha)},
        {"beta", number(ts.beta)},
        {"regime", std::string(to_string(ts.regime))},
        {"source", std::string(to_string(ts.source))},
        {"open_system", ts.open_system},
        {"negative_frequency", ts.negative_frequency},
        {"unvalidated", ts.unvalidated},
        {"omega1", number(ts.omega1)},
        {"omega2", number(ts.omega2)},
    };
}

nlohmann::json to_json(const RecurrenceReport& report) {
    nlohmann::json peaks = nlohmann::json::array();
    for (const auto& p : report.peaks) peaks.push_back({{"t", p.time}, {"height", p.height}});
    return {
        {"measured",
         {{"T_cl", number(report.measured_Tcl)},
          {"T_Q", optional_number(report.measured_TQ)},
          {"collapse_plateau", optional_number(report.collapse_plateau)}}},
        {"predicted", to_json(report.predicted)},
        {"deviations",
         {{"T_cl", number(report.deviation_Tcl)}, {"T_Q", optional_number(report.deviation_TQ)}}},
        {"peaks", peaks},
    };
}

}  // namespace qrecur
