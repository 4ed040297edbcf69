// Acceptance suite. Usage: acceptance <id> [<id> ...] | all
// Prints one "PASS <id>: ..." or "FAIL <id>: ..." line per criterion.

#include "qrecur/analysis.hpp"
#include "qrecur/commands.hpp"
#include "qrecur/config.hpp"
#include "qrecur/dynamics.hpp"
#include "qrecur/errors.hpp"
#include "qrecur/mathieu.hpp"
#include "qrecur/spectrum.hpp"
#include "qrecur/timescales.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace qrecur;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool passed = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) passed = false;
        notes.push_back((ok ? "" : "!") + what);
    }
};

ResonanceParams params(double omega, double zeta, double lambda, double hbar = 1.0) {
    ResonanceParams p;
    p.omega = omega;
    p.zeta = zeta;
    p.lambda = lambda;
    p.V = 1.0;
    p.hbar = hbar;
    return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double oracle_branch(double nu, double q, int M) {
    const auto o = characteristic_value_oracle(nu, q, M);
    Eigen::Index j = 0;
    o.vectors.row(o.row_of(0)).cwiseAbs().maxCoeff(&j);
    return o.values(j);
}

// ---------------------------------------------------------------------------

Outcome mathieu_correctness() {
    Outcome o;
    double worst = 0.0;
    for (double nu : {0.0, 0.5, 1.0, 2.7, 10.25}) {
        worst = std::max(worst, std::abs(characteristic_value(nu, 0.0).a - nu * nu));
    }
    o.require(worst <= 1e-12, fmt::format("max |a_nu(0) - nu^2| = {:.2e}", worst));

    const double a01 = characteristic_value(0.0, 1.0).a;
    const double dense = oracle_branch(0.0, 1.0, 200);
    o.require(std::abs(a01 - dense) <= 1e-10,
              fmt::format("|a_0(1) - oracle(M=200)| = {:.2e}", std::abs(a01 - dense)));

    double doubling = 0.0;
    for (double nu : {0.0, 0.5, 2.7, 10.25}) {
        const auto v = characteristic_value(nu, 1.0);
        doubling = std::max(doubling, rel(v.a, oracle_branch(nu, 1.0, 2 * v.truncation)));
    }
    o.require(doubling < 1e-12, fmt::format("doubling M moves a by {:.2e}", doubling));
    return o;
}

Outcome zero_coupling_reduction() {
    Outcome o;
    double worst = 0.0;
    for (auto p : {params(1.0, 0.5, 0.0), params(0.7, 0.3, 0.0, 0.4), params(2.0, 1.7, 0.0, 1.3)}) {
        p.H0 = 0.25;
        const auto s = build_spectrum(p, 20);
        if (s.entries.size() != 41) o.require(false, "spectrum does not cover m in [-20, 20]");
        for (const auto& [m, e] : s.entries) {
            const double expect = p.H0 + p.hbar * p.omega * e.k + 0.5 * p.zeta * std::pow(p.hbar * e.k, 2);
            worst = std::max(worst, std::abs(e.E - expect) / std::max(1.0, std::abs(expect)));
        }
    }
    o.require(worst <= 1e-12, fmt::format("max relative deviation {:.2e} over m in [-20, 20]", worst));
    return o;
}

Outcome spectrum_matrix_cross_validation() {
    Outcome o;
    const auto p = params(1.0, 0.5, 0.05);
    const auto s = build_spectrum(p, 10);
    std::map<int, const SpectrumFailure*> failed;
    for (const auto& f : s.failures) failed[f.m] = &f;

    const ResonancePropagator prop(p, 64);
    double worst_resolved = 0.0, worst_tied = 0.0;
    int resolved = 0, tied = 0;
    for (Eigen::Index j = 0; j < prop.energies().size(); ++j) {
        const int m = prop.dominant_index(j);
        if (std::abs(m) > 10) continue;
        const double level = prop.energies()(j);
        if (auto it = s.entries.find(m); it != s.entries.end()) {
            worst_resolved = std::max(worst_resolved, rel(it->second.E, level));
            ++resolved;
        } else if (auto f = failed.find(m); f != failed.end()) {
            // The tied pair must contain the matrix level.
            double best = INFINITY;
            for (double c : f->second->candidates) best = std::min(best, rel(c, level));
            worst_tied = std::max(worst_tied, best);
            ++tied;
        } else {
            o.require(false, fmt::format("label m = {} missing from the spectrum", m));
        }
    }
    o.require(resolved > 0 && worst_resolved <= 1e-7,
              fmt::format("{} resolved labels, max rel diff {:.2e}", resolved, worst_resolved));
    o.require(worst_tied <= 1e-7,
              fmt::format("{} labels on tied branches, candidate max rel diff {:.2e}", tied, worst_tied));
    return o;
}

Outcome closed_vs_numeric() {
    Outcome o;
    std::vector<double> lambdas;
    for (int i = 0; i < 10; ++i) lambdas.push_back(1e-3 * std::pow(10.0, i / 9.0));
    for (double zeta : {0.1, 10.0}) {
        const double mu = mu_parameter(params(1.0, zeta, 0.0));
        std::vector<double> ncl, nq, ccl, cq, gap;
        for (double l : lambdas) {
            const auto n = numeric_times(params(1.0, zeta, l));
            const auto c = closed_form_times(params(1.0, zeta, l));
            ncl.push_back(n.M_cl);
            nq.push_back(n.M_Q);
            ccl.push_back(c.M_cl);
            cq.push_back(c.M_Q);
            gap.push_back(std::max(std::abs(n.M_cl / c.M_cl - 1), std::abs(n.M_Q / c.M_Q - 1)));
        }
        for (auto [name, v] : {std::pair{"numeric M_cl", &ncl}, std::pair{"numeric M_Q", &nq},
                               std::pair{"closed M_cl", &ccl}, std::pair{"closed M_Q", &cq}}) {
            const double slope = loglog_slope(lambdas, *v);
            o.require(std::abs(slope - 2.0) <= 0.05,
                      fmt::format("mu={} {} exponent {:.4f}", mu, name, slope));
        }
        const double gap_slope = loglog_slope(lambdas, gap);
        o.require(std::abs(gap_slope - 2.0) <= 0.05,
                  fmt::format("mu={} disagreement exponent {:.3f}", mu, gap_slope));
        o.require(gap.front() <= 1e-3, fmt::format("mu={} disagreement at 1e-3: {:.2e}", mu, gap.front()));
    }
    return o;
}

Outcome case_identities() {
    Outcome o;
    double worst_b = 0.0, worst_c = 0.0;
    for (double lambda : {1e-3, 1e-2, 0.05}) {
        const auto b = closed_form_times(params(1.0, 0.1, lambda));
        const auto tb = times_from_factors(b.T0_cl, b.T0_Q, -b.alpha, 3 * b.alpha);
        worst_b = std::max(worst_b, std::abs(case_relations(tb).r_b));
        const auto c = closed_form_times(params(1.0, 10.0, lambda));
        const auto tc = times_from_factors(c.T0_cl, c.T0_Q, -c.beta, -c.beta);
        worst_c = std::max(worst_c, std::abs(case_relations(tc).r_c));
    }
    o.require(worst_b <= 1e-12, fmt::format("max |r_b| = {:.2e}", worst_b));
    o.require(worst_c <= 1e-12, fmt::format("max |r_c| = {:.2e}", worst_c));
    const auto a = closed_form_times(params(1.0, 0.0, 0.1));
    o.require(a.regime == Regime::case_a && a.M_cl == 0.0 && a.M_Q == 0.0 && std::isinf(a.Tl_Q),
              fmt::format("case a: M_cl={} M_Q={} Tl_Q={}", a.M_cl, a.M_Q, a.Tl_Q));
    return o;
}

Outcome hbar_law() {
    Outcome o;
    double worst = 0.0;
    for (double h : {0.25, 0.5, 1.0, 2.0}) {
        const double ratio = closed_form_times(params(1.0, 10.0, 0.01, h)).beta /
                             closed_form_times(params(1.0, 10.0, 0.01, 2 * h)).beta;
        worst = std::max(worst, std::abs(ratio - 16.0));
    }
    o.require(worst <= 1e-9, fmt::format("max |beta(hbar)/beta(2 hbar) - 16| = {:.2e}", worst));
    return o;
}

// Traces shared by criteria 7 and 8.
struct AcceptanceRun {
    ResonanceParams p;
    WavePacketSpec packet;
    int half_bandwidth;
    double dt;
    int steps;
};

const AcceptanceRun kFreeRun{params(1.0, 0.5, 0.0), {0.0, 2.0, 0.0}, 32, 0.01, 3100};
const AcceptanceRun kDeepRun{params(0.0, 1.0, 100.0), {2.0, std::sqrt(5.0), kPi / 2}, 48, 0.002, 4000};

AutocorrTrace trace_of(const AcceptanceRun& r) {
    return evolve(r.p, r.packet, r.dt, r.steps, r.half_bandwidth);
}

Outcome free_revival() {
    Outcome o;
    const auto tr = trace_of(kFreeRun);
    o.require(tr.t_max() >= 1.2 * 8 * kPi, fmt::format("trace covers t <= {:.3f}", tr.t_max()));
    const auto rep = extract_times(tr, closed_form_times(kFreeRun.p), 0.4);
    const double dcl = rep.measured_Tcl / (2 * kPi) - 1;
    o.require(std::abs(dcl) <= 0.02, fmt::format("T_cl = {:.5f} ({:+.2e} vs 2 pi)", rep.measured_Tcl, dcl));
    if (rep.measured_TQ) {
        const double dq = *rep.measured_TQ / (8 * kPi) - 1;
        o.require(std::abs(dq) <= 0.05, fmt::format("T_Q = {:.4f} ({:+.2e} vs 8 pi)", *rep.measured_TQ, dq));
    } else {
        o.require(false, "no revival found");
    }
    o.require(rep.collapse_plateau && *rep.collapse_plateau < 0.3,
              fmt::format("plateau = {:.4f}", rep.collapse_plateau.value_or(NAN)));
    return o;
}

Outcome deep_well() {
    Outcome o;
    const auto& r = kDeepRun;
    const auto centre = resonance_center_mode(r.p);
    o.require(std::abs(mathieu_q(r.p) - 400.0) < 1e-9, fmt::format("q = {}", mathieu_q(r.p)));
    const ResonancePropagator prop(r.p, r.half_bandwidth);
    const auto psi0 = packet_coefficients(r.packet, r.half_bandwidth);
    double lowest = 1.0;
    for (int n = 1; n <= 5; ++n) {
        lowest = std::min(lowest, std::norm(psi0.dot(prop.propagate(psi0, n * centre.period))));
    }
    o.require(lowest >= 0.9, fmt::format("min |C|^2 over 5 periods = {:.4f}", lowest));
    const auto rep = extract_times(trace_of(r), harmonic_center_times(r.p), 0.4);
    o.require(std::abs(rep.deviation_Tcl) <= 0.02,
              fmt::format("T_cl = {:.6f} ({:+.2e} vs 2 pi / 10)", rep.measured_Tcl, rep.deviation_Tcl));
    return o;
}

Outcome deep_well_spacing() {
    Outcome o;
    const auto rep = level_spacing_report(kDeepRun.p, 3);
    o.require(!rep.shortfall && rep.gaps.size() == 3,
              fmt::format("{} bound states below the barrier", rep.bound_states));
    if (rep.gaps.size() == 3) {
        const auto [lo, hi] = std::minmax_element(rep.gaps.begin(), rep.gaps.end());
        const double mean = (rep.gaps[0] + rep.gaps[1] + rep.gaps[2]) / 3.0;
        const double spread = (*hi - *lo) / mean;
        o.require(spread <= 0.01, fmt::format("gaps {:.5f} {:.5f} {:.5f}, spread {:.2e}", rep.gaps[0],
                                              rep.gaps[1], rep.gaps[2], spread));
    }
    return o;
}

Outcome unitarity() {
    Outcome o;
    for (const auto* r : {&kFreeRun, &kDeepRun}) {
        const auto tr = trace_of(*r);
        o.require(tr.meta.norm_drift <= 1e-12, fmt::format("norm drift {:.2e}", tr.meta.norm_drift));
        const ResonancePropagator prop(r->p, r->half_bandwidth);
        const auto psi0 = packet_coefficients(r->packet, r->half_bandwidth);
        double worst = 0.0;
        for (double t : {0.5 * tr.t_max(), tr.t_max()}) {
            const auto back = prop.propagate(prop.propagate(psi0, t), -t);
            worst = std::max(worst, std::abs(std::norm(psi0.dot(back)) - 1.0));
        }
        o.require(worst <= 1e-10, fmt::format("reversal error {:.2e}", worst));
    }
    return o;
}

std::string read_without_timestamp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::string out;
    for (std::string line; std::getline(in, line);) {
        if (line.rfind(kTimestampPrefix, 0) != 0) out += line + "\n";
    }
    return out;
}

Outcome sweep_determinism() {
    Outcome o;
    RunConfig cfg;
    cfg.params = params(1.0, 0.1, 0.0);
    cfg.axes = {SweepAxis{"lambda", 1e-3, 1e-2, 10, true}, SweepAxis{"zeta", 0.1, 10.0, 3, true}};
    const fs::path root = fs::temp_directory_path() / "qrecur_acceptance";
    std::string outputs[2];
    int index = 0;
    for (int workers : {1, 8}) {
        cfg.workers = workers;
        cfg.out_dir = (root / fmt::format("workers{}", workers)).string();
        fs::remove_all(cfg.out_dir);
        std::ostringstream console;
        const int code = cmd_sweep(cfg, console);
        o.require(code == kExitOk, fmt::format("workers={} exit {}", workers, code));
        outputs[index++] = read_without_timestamp(fs::path(cfg.out_dir) / "sweep.csv");
    }
    const auto rows = std::count(outputs[0].begin(), outputs[0].end(), '\n');
    o.require(!outputs[0].empty() && outputs[0] == outputs[1],
              fmt::format("{} lines, identical bytes: {}", rows, outputs[0] == outputs[1]));
    return o;
}

struct Criterion {
    std::string id;
    std::string title;
    double budget_seconds;
    std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all{
        {"1", "Mathieu correctness", 1.0, mathieu_correctness},
        {"2", "zero-coupling reduction", 1.0, zero_coupling_reduction},
        {"3", "spectrum/matrix cross-validation", 5.0, spectrum_matrix_cross_validation},
        {"4", "closed-form vs numeric time scales", 30.0, closed_vs_numeric},
        {"5", "case identities", 1.0, case_identities},
        {"6", "inverse fourth power of hbar", 1.0, hbar_law},
        {"7a", "free revival", 60.0, free_revival},
        {"7b", "deep-well oscillation", 60.0, deep_well},
        {"7c", "deep-well level spacing", 60.0, deep_well_spacing},
        {"8", "unitarity and reversibility", 60.0, unitarity},
        {"9", "sweep determinism", 60.0, sweep_determinism},
    };
    return all;
}

bool run_one(const Criterion& c) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = c.run();
    } catch (const std::exception& e) {
        o.require(false, fmt::format("threw: {}", e.what()));
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(elapsed <= c.budget_seconds, fmt::format("{:.2f} s (budget {} s)", elapsed, c.budget_seconds));
    std::string detail;
    for (const auto& n : o.notes) detail += (detail.empty() ? "" : "; ") + n;
    fmt::print("{} {}: {}: {}\n", o.passed ? "PASS" : "FAIL", c.id, c.title, detail);
    return o.passed;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> wanted(argv + 1, argv + argc);
    if (wanted.empty() || (wanted.size() == 1 && wanted[0] == "all")) {
        wanted.clear();
        for (const auto& c : criteria()) wanted.push_back(c.id);
    }
    bool ok = true;
    for (const auto& id : wanted) {
        const auto it = std::find_if(criteria().begin(), criteria().end(),
                                     [&](const Criterion& c) { return c.id == id; });
        if (it == criteria().end()) {
            fmt::print("FAIL {}: unknown criterion\n", id);
            ok = false;
            continue;
        }
        ok = run_one(*it) && ok;
    }
    return ok ? 0 : 1;
}
