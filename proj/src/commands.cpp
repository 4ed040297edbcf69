#include "qrecur/commands.hpp"

#include "qrecur/analysis.hpp"
#include "qrecur/errors.hpp"
#include "qrecur/numfmt.hpp"
#include "qrecur/spectrum.hpp"

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

namespace qrecur {

namespace {

namespace fs = std::filesystem;

std::string timestamp_line() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    return fmt::format("{} {:%Y-%m-%dT%H:%M:%SZ}\n", kTimestampPrefix, fmt::gmtime(now));
}

void write_file(const RunConfig& cfg, const std::string& name, const std::string& content) {
    fs::create_directories(cfg.out_dir);
    const fs::path path = fs::path(cfg.out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
    out << content;
}

void write_effective_config(const RunConfig& cfg) {
    write_file(cfg, "effective.cfg", effective_config_text(cfg));
}

std::string params_header(const ResonanceParams& p) {
    return fmt::format("# omega={} zeta={} lambda={} V={} N={} hbar={} H0={}\n", num(p.omega),
                       num(p.zeta), num(p.lambda), num(p.V), p.N, num(p.hbar), num(p.H0));
}

std::string csv_safe(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return s;
}

// Maps library errors to the exit-code contract.
int guarded(std::ostream& console, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        fmt::print(console, "config error: {}\n", e.what());
        return kExitConfig;
    } catch (const UnsupportedRegimeError& e) {
        fmt::print(console, "unsupported regime: {}\n", e.what());
        return kExitConfig;
    } catch (const BasisSizeError& e) {
        fmt::print(console, "basis too small: {}\n", e.what());
        return kExitConfig;
    } catch (const RangeError& e) {
        fmt::print(console, "invalid input: {}\n", e.what());
        return kExitConfig;
    } catch (const InputShapeError& e) {
        fmt::print(console, "invalid input: {}\n", e.what());
        return kExitConfig;
    } catch (const NumericalQualityError& e) {
        fmt::print(console, "numerical quality error: {}\n", e.what());
        return kExitNumeric;
    } catch (const ClassicalPeriodUnresolved& e) {
        fmt::print(console, "classical period unresolved: {}\n", e.what());
        return kExitUnresolved;
    }
}

constexpr std::string_view kTimesColumns =
    "T0_cl,T0_Q,M_cl,M_Q,Tl_cl,Tl_Q,mu,alpha,beta,regime,r_b,r_c,omega1,omega2";

std::string times_fields(const TimeScales& ts) {
    const CaseResiduals r = case_relations(ts);
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}", num(ts.T0_cl), num(ts.T0_Q),
                       num(ts.M_cl), num(ts.M_Q), num(ts.Tl_cl), num(ts.Tl_Q), num(ts.mu),
                       num(ts.alpha), num(ts.beta), to_string(ts.regime), num(r.r_b), num(r.r_c),
                       num(ts.omega1), num(ts.omega2));
}

constexpr std::size_t kTimesFieldCount = 14;

std::string blank_fields() {
    std::string s;
    for (std::size_t i = 0; i < kTimesFieldCount; ++i) s += i == 0 ? "nan" : ",nan";
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_times(const RunConfig& cfg, std::ostream& console) {
    return guarded(console, [&] {
        cfg.validate();
        write_effective_config(cfg);
        const TimeScales closed = closed_form_times(cfg.params);
        std::optional<TimeScales> numeric;
        std::string numeric_note;
        int code = kExitOk;
        try {
            numeric = numeric_times(cfg.params, cfg.label_step, MathieuOptions{cfg.tol, 1 << 14});
        } catch (const UnsupportedRegimeError& e) {
            numeric_note = e.what();
        } catch (const NumericalQualityError& e) {
            numeric_note = e.what();
            code = kExitNumeric;
        }

        auto cell = [](const std::optional<TimeScales>& ts, auto field) -> std::string {
            if (!ts) return "n/a";
            return field(*ts);
        };
        const std::optional<TimeScales> closed_opt = closed;
        auto row = [&](std::string_view label, auto field) {
            fmt::print(console, "{:<10} {:>24} {:>24}\n", label, cell(closed_opt, field),
                       cell(numeric, field));
        };
        fmt::print(console, "{:<10} {:>24} {:>24}\n", "quantity", "closed_form", "numeric_derivative");
        row("T0_cl", [](const TimeScales& t) { return num(t.T0_cl); });
        row("T0_Q", [](const TimeScales& t) { return num(t.T0_Q); });
        row("M_cl", [](const TimeScales& t) { return num(t.M_cl); });
        row("M_Q", [](const TimeScales& t) { return num(t.M_Q); });
        row("Tl_cl", [](const TimeScales& t) { return num(t.Tl_cl); });
        row("Tl_Q", [](const TimeScales& t) { return num(t.Tl_Q); });
        row("mu", [](const TimeScales& t) { return num(t.mu); });
        row("alpha", [](const TimeScales& t) { return num(t.alpha); });
        row("beta", [](const TimeScales& t) { return num(t.beta); });
        row("r_b", [](const TimeScales& t) { return num(case_relations(t).r_b); });
        row("r_c", [](const TimeScales& t) { return num(case_relations(t).r_c); });
        row("regime", [](const TimeScales& t) { return std::string(to_string(t.regime)); });
        if (closed.open_system) fmt::print(console, "note: omega = 0, open system (infinite classical period)\n");
        if (closed.unvalidated) fmt::print(console, "note: zeta < 0, closed forms are unvalidated here\n");
        if (numeric && numeric->negative_frequency) {
            fmt::print(console, "warning: numeric omega1 <= 0, period sign preserved\n");
        }
        if (!numeric_note.empty()) fmt::print(console, "numeric_derivative unavailable: {}\n", numeric_note);

        std::string csv = "# qrecur times\n" + timestamp_line() + params_header(cfg.params);
        if (!numeric_note.empty()) csv += "# numeric_derivative unavailable: " + csv_safe(numeric_note) + "\n";
        csv += fmt::format("source,{}\n", kTimesColumns);
        csv += fmt::format("closed_form,{}\n", times_fields(closed));
        if (numeric) csv += fmt::format("numeric_derivative,{}\n", times_fields(*numeric));
        write_file(cfg, "times.csv", csv);
        return code;
    });
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& console) {
    return guarded(console, [&] {
        cfg.validate();
        write_effective_config(cfg);
        const Spectrum s = build_spectrum(cfg.params, cfg.m_range, MathieuOptions{cfg.tol, 1 << 14});
        std::ostringstream body;
        write_spectrum_csv(body, s);
        write_file(cfg, "spectrum.csv",
                   "# qrecur spectrum\n" + timestamp_line() + params_header(cfg.params) + body.str());
        fmt::print(console, "spectrum: {} entries, {} degenerate, q = {}, nu0 = {}\n", s.entries.size(),
                   s.failures.size(), num(s.q), num(s.nu0));
        return kExitOk;
    });
}

int cmd_evolve(const RunConfig& cfg, std::ostream& console) {
    return guarded(console, [&] {
        cfg.validate();
        write_effective_config(cfg);
        const AutocorrTrace trace =
            evolve(cfg.params, cfg.packet, cfg.dt, cfg.steps, cfg.half_bandwidth);

        std::string csv = "# qrecur evolve trace\n" + timestamp_line() + params_header(cfg.params);
        csv += fmt::format("# packet mean_m={} sigma_m={} theta0={}\n", num(cfg.packet.mean_m),
                           num(cfg.packet.sigma_m), num(cfg.packet.theta0));
        csv += fmt::format("# half_bandwidth={} dt={} steps={} norm_drift={}\n", cfg.half_bandwidth,
                           num(cfg.dt), cfg.steps, num(trace.meta.norm_drift));
        csv += "t,C2\n";
        for (std::size_t j = 0; j < trace.values.size(); ++j) {
            csv += fmt::format("{},{}\n", num(trace.time(j)), num(trace.values[j]));
        }
        write_file(cfg, "trace.csv", csv);

        TimeScales predicted;
        switch (cfg.prediction) {
            case Prediction::closed_form: predicted = closed_form_times(cfg.params); break;
            case Prediction::numeric:
                predicted = numeric_times(cfg.params, cfg.label_step, MathieuOptions{cfg.tol, 1 << 14});
                break;
            case Prediction::center: predicted = harmonic_center_times(cfg.params); break;
        }
        nlohmann::json doc;
        doc["trace"] = {{"dt", cfg.dt},
                        {"steps", cfg.steps},
                        {"half_bandwidth", cfg.half_bandwidth},
                        {"norm_drift", trace.meta.norm_drift}};
        int code = kExitOk;
        try {
            const RecurrenceReport report = extract_times(trace, predicted, cfg.threshold);
            doc["report"] = to_json(report);
            fmt::print(console, "measured T_cl = {} (predicted {}, deviation {})\n",
                       num(report.measured_Tcl), num(predicted.Tl_cl), num(report.deviation_Tcl));
            if (report.measured_TQ) {
                fmt::print(console, "measured T_Q = {} (predicted {}, deviation {})\n",
                           num(*report.measured_TQ), num(predicted.Tl_Q), num(*report.deviation_TQ));
            } else {
                fmt::print(console, "measured T_Q: absent (predicted {})\n", num(predicted.Tl_Q));
            }
        } catch (const ClassicalPeriodUnresolved& e) {
            doc["report"] = nullptr;
            doc["error"] = e.what();
            doc["predicted"] = to_json(predicted);
            fmt::print(console, "classical period unresolved: {}\n", e.what());
            code = kExitUnresolved;
        }
        write_file(cfg, "report.json", doc.dump(2) + "\n");
        return code;
    });
}

int cmd_sweep(const RunConfig& cfg, std::ostream& console) {
    return guarded(console, [&] {
        cfg.validate();
        write_effective_config(cfg);

        std::vector<std::vector<double>> grid{{}};
        for (const auto& axis : cfg.axes) {
            std::vector<std::vector<double>> next;
            for (const auto& point : grid) {
                for (double v : axis.values()) {
                    auto p = point;
                    p.push_back(v);
                    next.push_back(std::move(p));
                }
            }
            grid = std::move(next);
        }

        const MathieuOptions options{cfg.tol, 1 << 14};
        auto compute_row = [&](const std::vector<double>& point) {
            ResonanceParams p = cfg.params;
            for (std::size_t a = 0; a < point.size(); ++a) p = with_parameter(p, cfg.axes[a].param, point[a]);
            std::string row;
            for (double v : point) row += num(v) + ",";
            row += fmt::format("{},{},{},{},{},{},{}", num(p.omega), num(p.zeta), num(p.lambda), num(p.V),
                               p.N, num(p.hbar), num(p.H0));
            std::string error;
            try {
                row += "," + times_fields(closed_form_times(p));
            } catch (const Error& e) {
                row += "," + blank_fields();
                error = e.what();
            }
            try {
                row += "," + times_fields(numeric_times(p, cfg.label_step, options));
            } catch (const Error& e) {
                row += "," + blank_fields();
                if (error.empty()) error = e.what();
            }
            return row + "," + csv_safe(error) + "\n";
        };

        std::vector<std::string> rows(grid.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < grid.size(); i = next++) rows[i] = compute_row(grid[i]);
        };
        const int nthreads = std::max(1, std::min<int>(cfg.workers, static_cast<int>(grid.size())));
        std::vector<std::thread> pool;
        for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();

        std::string csv = "# qrecur sweep\n" + timestamp_line() + params_header(cfg.params);
        std::string header;
        for (const auto& axis : cfg.axes) header += "axis_" + axis.param + ",";
        header += "omega,zeta,lambda,V,N,hbar,H0";
        for (std::string_view prefix : {"cf_", "num_"}) {
            std::string cols(kTimesColumns);
            std::string prefixed;
            std::size_t start = 0;
            while (start <= cols.size()) {
                const auto comma = cols.find(',', start);
                const auto end = comma == std::string::npos ? cols.size() : comma;
                prefixed += fmt::format(",{}{}", prefix, cols.substr(start, end - start));
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            header += prefixed;
        }
        csv += header + ",error\n";
        for (const auto& r : rows) csv += r;
        write_file(cfg, "sweep.csv", csv);
        fmt::print(console, "sweep: {} rows written to {}\n", rows.size(),
                   (fs::path(cfg.out_dir) / "sweep.csv").string());
        return kExitOk;
    });
}

int cmd_verify(const std::optional<std::string>& module, const std::optional<double>& tol,
               std::ostream& console) {
    if (module) {
        const auto& mods = verify_modules();
        if (std::find(mods.begin(), mods.end(), *module) == mods.end()) {
            fmt::print(console, "config error: unknown module '{}'\n", *module);
            return kExitConfig;
        }
    }
    const auto results = run_verify(module, tol);
    int failed = 0;
    for (const auto& r : results) {
        fmt::print(console, "{} {}/{}: {}\n", r.passed ? "PASS" : "FAIL", r.module, r.name, r.detail);
        if (!r.passed) ++failed;
    }
    fmt::print(console, "{} checks, {} failed\n", results.size(), failed);
    return failed == 0 ? kExitOk : kExitNumeric;
}

// ---------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"qrecur: quasi-energies, recurrence times and wave-packet revivals near a nonlinear "
                 "resonance"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int workers = 0;
    double tol = 0.0;
    std::vector<std::string> settings;
    std::string module;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file (key = value)");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--workers", workers, "worker threads for sweeps");
        sub->add_option("--tol", tol, "tolerance override");
        sub->add_option("--set", settings, "override one key: --set key=value");
    };
    auto* times = app.add_subcommand("times", "closed-form and numeric time scales");
    auto* spectrum = app.add_subcommand("spectrum", "quasi-energy spectrum as CSV");
    auto* evolve_cmd = app.add_subcommand("evolve", "propagate a packet, write trace and report");
    auto* sweep = app.add_subcommand("sweep", "time scales over a parameter grid");
    auto* verify = app.add_subcommand("verify", "run the invariant suite");
    for (auto* sub : {times, spectrum, evolve_cmd, sweep, verify}) add_common(sub);
    verify->add_option("--module", module, "run one module's checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (verify->parsed()) {
        return cmd_verify(module.empty() ? std::nullopt : std::optional<std::string>(module),
                          tol > 0.0 ? std::optional<double>(tol) : std::nullopt, out);
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = load_config(config_path);
        for (const auto& s : settings) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ConfigError(fmt::format("--set expects key=value, got '{}'", s));
            apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (workers != 0) cfg.workers = workers;
        if (tol != 0.0) cfg.tol = tol;
    } catch (const ConfigError& e) {
        fmt::print(err, "config error: {}\n", e.what());
        return kExitConfig;
    }

    if (times->parsed()) return cmd_times(cfg, out);
    if (spectrum->parsed()) return cmd_spectrum(cfg, out);
    if (evolve_cmd->parsed()) return cmd_evolve(cfg, out);
    return cmd_sweep(cfg, out);
}

}  // namespace qrecur
