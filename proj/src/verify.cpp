#include "qrecur/analysis.hpp"
#include "qrecur/commands.hpp"
#include "qrecur/errors.hpp"
#include "qrecur/mathieu.hpp"
#include "qrecur/resonance_model.hpp"
#include "qrecur/spectrum.hpp"
#include "qrecur/timescales.hpp"

#include <fmt/format.h>

#include <cmath>
#include <functional>
#include <numbers>

namespace qrecur {

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
    const char* module;
    const char* name;
    double default_tol;
    // Returns the measured error; the check passes when error <= tolerance.
    std::function<double()> measure;
};

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

ResonanceParams params(double omega, double zeta, double lambda, double V = 1.0, int N = 1,
                       double hbar = 1.0) {
    ResonanceParams p;
    p.omega = omega;
    p.zeta = zeta;
    p.lambda = lambda;
    p.V = V;
    p.N = N;
    p.hbar = hbar;
    return p;
}

const std::vector<Check>& checks() {
    static const std::vector<Check> all{
        {"resonance-model", "fourier_single_harmonic", 1e-12,
         [] {
             AngleGrid g{16, 16, {}};
             for (std::size_t i = 0; i < 16; ++i)
                 for (std::size_t j = 0; j < 16; ++j)
                     g.values.push_back(std::cos(2 * kPi * (double(i) - double(j)) / 16.0));
             return std::abs(coupling_fourier_amplitude(g, {1, -1}) - 0.5);
         }},
        {"resonance-model", "reduce_quadratic", 1e-10,
         [] {
             std::vector<std::pair<double, double>> s;
             for (int i = 0; i <= 40; ++i) {
                 const double I = 0.05 * i;
                 s.emplace_back(I, 0.5 * I * I);
             }
             const auto p = reduce_to_resonance(FrequencyCurve(s, CurveKind::H0), 1.0, {}, 1.0);
             return std::max(rel(p.omega, 1.0), rel(p.zeta, 1.0));
         }},
        {"resonance-model", "resonance_root", 1e-9,
         [] {
             std::vector<std::pair<double, double>> a, b;
             for (int i = 0; i <= 40; ++i) {
                 a.emplace_back(0.1 * i, 0.1 * i);
                 b.emplace_back(0.1 * i, 1.0);
             }
             const auto r = find_resonances(FrequencyCurve(a, CurveKind::Omega1),
                                            FrequencyCurve(b, CurveKind::Omega2), {1, -2});
             return r.roots.size() == 1 ? std::abs(r.roots[0] - 2.0) : 1.0;
         }},
        {"mathieu", "q0_identity", 1e-12,
         [] {
             double err = 0.0;
             for (double nu : {0.0, 0.5, 1.0, 2.7, 10.25})
                 err = std::max(err, std::abs(characteristic_value(nu, 0.0).a - nu * nu));
             return err;
         }},
        {"mathieu", "oracle_agreement", 1e-10,
         [] {
             const auto v = characteristic_value(0.0, 1.0);
             const auto o = characteristic_value_oracle(0.0, 1.0, 200);
             Eigen::Index j = 0;
             o.vectors.row(o.row_of(0)).cwiseAbs().maxCoeff(&j);
             return std::abs(v.a - o.values(j));
         }},
        {"mathieu", "order_symmetry", 1e-10,
         [] {
             double err = 0.0;
             for (double nu : {0.3, 1.7, 4.45})
                 err = std::max(err, std::abs(characteristic_value(nu, 2.0).a -
                                              characteristic_value(-nu, 2.0).a));
             return err;
         }},
        {"mathieu", "q_parity", 1e-10,
         [] {
             return std::abs(characteristic_value(0.7, 1.3).a - characteristic_value(0.7, -1.3).a);
         }},
        {"spectrum", "lambda0_reduction", 1e-12,
         [] {
             const auto p = params(1.0, 0.5, 0.0);
             const auto s = build_spectrum(p, 20);
             double err = 0.0;
             for (const auto& [m, e] : s.entries) {
                 const double k = e.k;
                 err = std::max(err, rel(e.E, p.H0 + p.hbar * p.omega * k + 0.5 * p.zeta * k * k));
             }
             return err;
         }},
        {"spectrum", "matrix_cross_validation", 1e-7,
         [] {
             // Non-integer nu0 keeps every label on a unique branch.
             const auto p = params(1.3, 0.5, 0.05);
             const auto s = build_spectrum(p, 10);
             const auto o = characteristic_value_oracle(base_order(p), mathieu_q(p), 64);
             const double scale = p.N * p.N * p.zeta * p.hbar * p.hbar / 8.0;
             double err = 0.0;
             for (const auto& [m, e] : s.entries) {
                 Eigen::Index j = 0;
                 o.vectors.row(o.row_of(m)).cwiseAbs().maxCoeff(&j);
                 const double E = scale * o.values(j) - p.omega * p.omega / (2 * p.zeta) + p.H0;
                 err = std::max(err, std::abs(e.E - E) / std::max(1.0, std::abs(E)));
             }
             return err;
         }},
        {"timescales", "lambda0_identity", 1e-12,
         [] {
             const auto ts = closed_form_times(params(1.0, 0.1, 0.0));
             const auto r = case_relations(ts);
             return std::max({std::abs(ts.Tl_cl - ts.T0_cl), std::abs(ts.Tl_Q - ts.T0_Q),
                              std::abs(r.r_b), std::abs(r.r_c)});
         }},
        {"timescales", "case_b_identity", 1e-12,
         [] {
             const double alpha = 3e-3;
             return std::abs(case_relations(times_from_factors(2 * kPi, 40 * kPi, -alpha, 3 * alpha)).r_b);
         }},
        {"timescales", "case_c_identity", 1e-12,
         [] {
             const double beta = 2e-3;
             return std::abs(case_relations(times_from_factors(2 * kPi, 0.8 * kPi, -beta, -beta)).r_c);
         }},
        {"timescales", "hbar4_law", 1e-9,
         [] {
             const double b1 = closed_form_times(params(1.0, 10.0, 0.01, 1.0, 1, 1.0)).beta;
             const double b2 = closed_form_times(params(1.0, 10.0, 0.01, 1.0, 1, 2.0)).beta;
             return std::abs(b1 / b2 - 16.0);
         }},
        {"timescales", "closed_vs_numeric", 1e-2,
         [] {
             const auto p = params(1.0, 0.1, 0.05);
             const auto c = closed_form_times(p);
             const auto n = numeric_times(p);
             return std::max(rel(n.Tl_cl, c.Tl_cl), rel(n.Tl_Q, c.Tl_Q));
         }},
        {"dynamics", "unitarity", 1e-12,
         [] {
             const auto tr = evolve(params(1.0, 0.5, 0.05), {0.0, 2.0, 0.0}, 0.05, 400, 48);
             return tr.meta.norm_drift;
         }},
        {"dynamics", "time_reversal", 1e-10,
         [] {
             const ResonancePropagator prop(params(1.0, 0.5, 0.05), 48);
             const auto psi0 = packet_coefficients({0.0, 2.0, 0.3}, 48);
             const auto back = prop.propagate(prop.propagate(psi0, 37.5), -37.5);
             return std::abs(std::norm(psi0.dot(back)) - 1.0);
         }},
        {"dynamics", "center_frequency", 1e-12,
         [] { return std::abs(resonance_center_mode(params(0.0, 0.25, 0.3, 1.2, 2)).frequency - 0.6); }},
        {"analysis", "parabola_vertex", 1e-12,
         [] {
             auto f = [](double x) { return 0.9 - 2.0 * (x - 0.37) * (x - 0.37); };
             const Peak v = parabolic_vertex(f(-1.0), f(0.0), f(1.0));
             return std::max(std::abs(v.time - 0.37), std::abs(v.height - 0.9));
         }},
        {"analysis", "cosine_trace_peaks", 1e-3,
         [] {
             AutocorrTrace tr;
             tr.dt = 0.01;
             for (int j = 0; j * 0.01 <= 13.0; ++j) tr.values.push_back(std::pow(std::cos(j * 0.005), 2));
             const auto peaks = detect_peaks(tr, 0.5);
             return peaks.size() == 2
                        ? std::max(std::abs(peaks[0].time - 2 * kPi), std::abs(peaks[1].time - 4 * kPi))
                        : 1.0;
         }},
    };
    return all;
}

}  // namespace

const std::vector<std::string>& verify_modules() {
    static const std::vector<std::string> mods{"resonance-model", "mathieu",  "spectrum",
                                               "timescales",      "dynamics", "analysis"};
    return mods;
}

std::vector<CheckResult> run_verify(const std::optional<std::string>& module,
                                    const std::optional<double>& tol) {
    std::vector<CheckResult> out;
    for (const auto& c : checks()) {
        if (module && *module != c.module) continue;
        const double limit = tol.value_or(c.default_tol);
        CheckResult r{c.module, c.name, false, {}};
        try {
            const double err = c.measure();
            r.passed = err <= limit;
            r.detail = fmt::format("error {:.3e} (tolerance {:.1e})", err, limit);
        } catch (const std::exception& e) {
            r.detail = fmt::format("threw: {}", e.what());
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace qrecur
