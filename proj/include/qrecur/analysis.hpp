#pragma once

// Recurrence measurements on |C(t)|^2 traces.

#include "qrecur/dynamics.hpp"
#include "qrecur/timescales.hpp"

#include <json.hpp>

#include <optional>
#include <vector>

namespace qrecur {

struct Peak {
    double time = 0.0;
    double height = 0.0;
};

// Strict local maxima above `threshold`, refined by a three-point parabola.
// The sample at t = 0 is never reported.
std::vector<Peak> detect_peaks(const AutocorrTrace& trace, double threshold);

// Vertex offset (in samples) and height of the parabola through three
// equally spaced points around a maximum.
Peak parabolic_vertex(double left, double centre, double right);

struct RecurrenceReport {
    double measured_Tcl = 0.0;
    std::optional<double> measured_TQ;
    TimeScales predicted;
    double deviation_Tcl = 0.0;               // measured / predicted - 1
    std::optional<double> deviation_TQ;
    std::optional<double> collapse_plateau;  // median between first period and revival window
    std::vector<Peak> peaks;                 // every peak above threshold
};

// Throws ClassicalPeriodUnresolved when the trace is shorter than three
// predicted periods or has fewer than two early peaks.
RecurrenceReport extract_times(const AutocorrTrace& trace, const TimeScales& predicted,
                               double threshold);

// Prediction for a packet oscillating in the harmonic bottom of the resonance well.
TimeScales harmonic_center_times(const ResonanceParams& p);

nlohmann::json to_json(const RecurrenceReport& report);
nlohmann::json to_json(const TimeScales& ts);

}  // namespace qrecur
