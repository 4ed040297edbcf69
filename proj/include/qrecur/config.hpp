#pragma once

// Flat "key = value" run configuration with '#' comments.

#include "qrecur/dynamics.hpp"
#include "qrecur/resonance_model.hpp"
#include "qrecur/timescales.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qrecur {

struct SweepAxis {
    std::string param;  // one of sweepable_parameters()
    double min = 0.0;
    double max = 0.0;
    int count = 1;
    bool log = false;   // logarithmic spacing

    std::vector<double> values() const;
};

enum class Prediction { closed_form, numeric, center };

struct RunConfig {
    ResonanceParams params;
    WavePacketSpec packet;

    double tol = 1e-12;         // Mathieu convergence target
    int half_bandwidth = 64;    // dynamics basis |m| <= M
    double dt = 0.01;
    int steps = 2000;
    double threshold = 0.4;     // peak detection
    int m_range = 10;           // spectrum labels m in [-m_range, m_range]
    std::optional<double> label_step;  // automatic when empty
    Prediction prediction = Prediction::closed_form;

    std::vector<SweepAxis> axes;  // at most two
    std::string out_dir = ".";
    int workers = 1;

    // Throws ConfigError when a control is out of range.
    void validate() const;
};

const std::vector<std::string>& sweepable_parameters();

// Sets one key. Throws ConfigError for unknown keys or unparsable values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

// Every key with its effective value; parsing the text reproduces the config.
std::string effective_config_text(const RunConfig& cfg);

// Copy of params with `name` set to `value`.
ResonanceParams with_parameter(const ResonanceParams& p, const std::string& name, double value);

}  // namespace qrecur
