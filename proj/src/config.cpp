#include "qrecur/config.hpp"

#include "qrecur/errors.hpp"
#include "qrecur/numfmt.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace qrecur {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError(fmt::format("{}: '{}' is not a number", key, v));
    }
    if (used != v.size()) throw ConfigError(fmt::format("{}: '{}' is not a number", key, v));
    return x;
}

int parse_int(const std::string& key, const std::string& v) {
    int x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError(fmt::format("{}: '{}' is not an integer", key, v));
    }
    return x;
}

std::string_view prediction_name(Prediction p) {
    switch (p) {
        case Prediction::closed_form: return "closed_form";
        case Prediction::numeric: return "numeric";
        case Prediction::center: return "center";
    }
    return "closed_form";
}

SweepAxis& axis_slot(RunConfig& cfg, int index) {
    if (cfg.axes.size() < static_cast<std::size_t>(index)) cfg.axes.resize(index);
    return cfg.axes[index - 1];
}

}  // namespace

std::vector<double> SweepAxis::values() const {
    std::vector<double> out;
    if (count == 1) return {min};
    for (int i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / (count - 1);
        out.push_back(log ? std::exp(std::log(min) + f * (std::log(max) - std::log(min)))
                          : min + f * (max - min));
    }
    return out;
}

const std::vector<std::string>& sweepable_parameters() {
    static const std::vector<std::string> names{"omega", "zeta", "lambda", "V", "hbar", "H0", "I0"};
    return names;
}

ResonanceParams with_parameter(const ResonanceParams& p, const std::string& name, double value) {
    ResonanceParams out = p;
    if (name == "omega") out.omega = value;
    else if (name == "zeta") out.zeta = value;
    else if (name == "lambda") out.lambda = value;
    else if (name == "V") out.V = value;
    else if (name == "hbar") out.hbar = value;
    else if (name == "H0") out.H0 = value;
    else if (name == "I0") out.I0 = value;
    else throw ConfigError(fmt::format("'{}' is not a sweepable parameter", name));
    return out;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    auto& p = cfg.params;
    if (key == "omega") p.omega = parse_double(key, v);
    else if (key == "zeta") p.zeta = parse_double(key, v);
    else if (key == "lambda") p.lambda = parse_double(key, v);
    else if (key == "V") p.V = parse_double(key, v);
    else if (key == "N") p.N = parse_int(key, v);
    else if (key == "M") {
        if (v.empty() || v == "none") p.M.reset();
        else p.M = parse_int(key, v);
    }
    else if (key == "hbar") p.hbar = parse_double(key, v);
    else if (key == "H0") p.H0 = parse_double(key, v);
    else if (key == "I0") p.I0 = parse_double(key, v);
    else if (key == "mean_m") cfg.packet.mean_m = parse_double(key, v);
    else if (key == "sigma_m") cfg.packet.sigma_m = parse_double(key, v);
    else if (key == "theta0") cfg.packet.theta0 = parse_double(key, v);
    else if (key == "tol") cfg.tol = parse_double(key, v);
    else if (key == "half_bandwidth") cfg.half_bandwidth = parse_int(key, v);
    else if (key == "dt") cfg.dt = parse_double(key, v);
    else if (key == "steps") cfg.steps = parse_int(key, v);
    else if (key == "threshold") cfg.threshold = parse_double(key, v);
    else if (key == "m_range") cfg.m_range = parse_int(key, v);
    else if (key == "label_step") {
        if (v == "auto") cfg.label_step.reset();
        else cfg.label_step = parse_double(key, v);
    }
    else if (key == "prediction") {
        if (v == "closed_form") cfg.prediction = Prediction::closed_form;
        else if (v == "numeric") cfg.prediction = Prediction::numeric;
        else if (v == "center") cfg.prediction = Prediction::center;
        else throw ConfigError(fmt::format("prediction: unknown mode '{}'", v));
    }
    else if (key == "out") cfg.out_dir = v;
    else if (key == "workers") cfg.workers = parse_int(key, v);
    else if (key.rfind("sweep", 0) == 0) {
        // sweep1.param, sweep1.min, sweep1.max, sweep1.count, sweep1.scale (and sweep2.*)
        const auto dot = key.find('.');
        const std::string slot = key.substr(0, dot);
        if (dot == std::string::npos || (slot != "sweep1" && slot != "sweep2")) {
            throw ConfigError(fmt::format("unknown key '{}'", key));
        }
        SweepAxis& axis = axis_slot(cfg, slot == "sweep1" ? 1 : 2);
        const std::string field = key.substr(dot + 1);
        if (field == "param") axis.param = v;
        else if (field == "min") axis.min = parse_double(key, v);
        else if (field == "max") axis.max = parse_double(key, v);
        else if (field == "count") axis.count = parse_int(key, v);
        else if (field == "scale") {
            if (v != "lin" && v != "log") throw ConfigError(fmt::format("{}: use lin or log", key));
            axis.log = v == "log";
        }
        else throw ConfigError(fmt::format("unknown key '{}'", key));
    }
    else throw ConfigError(fmt::format("unknown key '{}'", key));
}

void RunConfig::validate() const {
    try {
        params.validate();
    } catch (const RangeError& e) {
        throw ConfigError(e.what());
    }
    auto positive = [](const char* name, double x) {
        if (!(x > 0.0)) throw ConfigError(fmt::format("{} must be positive (got {})", name, x));
    };
    positive("tol", tol);
    positive("half_bandwidth", half_bandwidth);
    positive("dt", dt);
    positive("steps", steps);
    positive("m_range", m_range);
    if (label_step) positive("label_step", *label_step);
    positive("workers", workers);
    positive("sigma_m", packet.sigma_m);
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");
    if (half_bandwidth < 4) throw ConfigError("half_bandwidth must be >= 4");
    if (axes.size() > 2) throw ConfigError("at most two sweep axes");
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const auto& a = axes[i];
        const auto& names = sweepable_parameters();
        if (std::find(names.begin(), names.end(), a.param) == names.end()) {
            throw ConfigError(fmt::format("sweep{}.param '{}' is not a sweepable parameter", i + 1,
                                          a.param));
        }
        if (a.count < 1) throw ConfigError(fmt::format("sweep{}.count must be >= 1", i + 1));
        if (a.log && !(a.min > 0.0 && a.max > 0.0)) {
            throw ConfigError(fmt::format("sweep{} log scale needs positive bounds", i + 1));
        }
    }
}

RunConfig parse_config(std::istream& in, RunConfig base) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(fmt::format("line {}: expected 'key = value'", lineno));
        }
        try {
            apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("line {}: {}", lineno, e.what()));
        }
    }
    return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path));
    return parse_config(in, std::move(base));
}

std::string effective_config_text(const RunConfig& cfg) {
    const auto& p = cfg.params;
    std::string s;
    auto put = [&s](std::string_view key, const std::string& value) {
        s += fmt::format("{} = {}\n", key, value);
    };
    put("omega", num(p.omega));
    put("zeta", num(p.zeta));
    put("lambda", num(p.lambda));
    put("V", num(p.V));
    put("N", std::to_string(p.N));
    put("M", p.M ? std::to_string(*p.M) : "none");
    put("hbar", num(p.hbar));
    put("H0", num(p.H0));
    put("I0", num(p.I0));
    put("mean_m", num(cfg.packet.mean_m));
    put("sigma_m", num(cfg.packet.sigma_m));
    put("theta0", num(cfg.packet.theta0));
    put("tol", num(cfg.tol));
    put("half_bandwidth", std::to_string(cfg.half_bandwidth));
    put("dt", num(cfg.dt));
    put("steps", std::to_string(cfg.steps));
    put("threshold", num(cfg.threshold));
    put("m_range", std::to_string(cfg.m_range));
    put("label_step", cfg.label_step ? num(*cfg.label_step) : "auto");
    put("prediction", std::string(prediction_name(cfg.prediction)));
    for (std::size_t i = 0; i < cfg.axes.size(); ++i) {
        const auto& a = cfg.axes[i];
        const std::string slot = fmt::format("sweep{}", i + 1);
        put(slot + ".param", a.param);
        put(slot + ".min", num(a.min));
        put(slot + ".max", num(a.max));
        put(slot + ".count", std::to_string(a.count));
        put(slot + ".scale", a.log ? "log" : "lin");
    }
    put("out", cfg.out_dir);
    put("workers", std::to_string(cfg.workers));
    return s;
}

}  // namespace qrecur
