#include <doctest.h>

#include "qrecur/errors.hpp"
#include "qrecur/timescales.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace qrecur;

namespace {

constexpr double kPi = std::numbers::pi;

ResonanceParams params(double omega, double zeta, double lambda, double hbar = 1.0, int N = 1) {
    ResonanceParams p;
    p.omega = omega;
    p.zeta = zeta;
    p.lambda = lambda;
    p.V = 1.0;
    p.N = N;
    p.hbar = hbar;
    return p;
}

// Least-squares slope of log|y| against log x.
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

std::vector<double> decade(int count) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(1e-3 * std::pow(10.0, double(i) / (count - 1)));
    return out;
}

}  // namespace

TEST_CASE("zero coupling leaves both times unmodified") {
    const auto p = params(1.0, 0.1, 0.0);
    const auto c = closed_form_times(p);
    CHECK(c.Tl_cl == c.T0_cl);
    CHECK(c.Tl_Q == c.T0_Q);
    CHECK(c.T0_cl == doctest::Approx(2 * kPi));
    CHECK(c.T0_Q == doctest::Approx(40 * kPi));
    const auto n = numeric_times(p);
    CHECK(std::abs(n.omega1 - 1.0) <= 1e-9);
    CHECK(std::abs(n.omega2 / 0.05 - 1.0) <= 1e-9);
    const auto r = case_relations(c);
    CHECK(r.r_b == 0.0);
    CHECK(r.r_c == 0.0);
}

TEST_CASE("linear regime has only a classical period") {
    const auto ts = closed_form_times(params(2.0, 0.0, 0.3));
    CHECK(ts.regime == Regime::case_a);
    CHECK(ts.M_cl == 0.0);
    CHECK(ts.M_Q == 0.0);
    CHECK(ts.T0_cl == doctest::Approx(kPi));
    CHECK(ts.Tl_cl == ts.T0_cl);
    CHECK(std::isinf(ts.T0_Q));
    CHECK(std::isinf(ts.Tl_Q));
    CHECK_THROWS_AS(numeric_times(params(2.0, 0.0, 0.3)), UnsupportedRegimeError);
}

TEST_CASE("closed-form factors at mu = 0.05") {
    const auto p = params(1.0, 0.1, 0.05);
    const auto ts = closed_form_times(p);
    CHECK(ts.mu == doctest::Approx(0.05));
    CHECK(ts.regime == Regime::case_b);
    // Direct evaluation of the mu-form expressions.
    const double mu = 0.05, g = 0.05 * 0.1;
    const double m_cl = -0.5 * g * g / std::pow(1 - mu * mu, 2);
    const double m_q = 0.5 * g * g * (3 + mu * mu) / std::pow(1 - mu * mu, 3);
    CHECK(ts.M_cl == doctest::Approx(m_cl).epsilon(1e-13));
    CHECK(ts.M_Q == doctest::Approx(m_q).epsilon(1e-13));
    CHECK(ts.M_cl == doctest::Approx(-1.2562735158698756e-5).epsilon(1e-12));
    CHECK(ts.M_Q == doctest::Approx(3.781414768320102e-5).epsilon(1e-12));
    CHECK(ts.Tl_cl == doctest::Approx((1 - ts.M_cl) * ts.T0_cl).epsilon(1e-15));
    CHECK(ts.Tl_Q == doctest::Approx((1 - ts.M_Q) * ts.T0_Q).epsilon(1e-15));
    CHECK(ts.alpha == doctest::Approx(0.5 * g * g));
}

TEST_CASE("numeric times agree with the closed forms at small q") {
    const auto p = params(1.0, 0.1, 0.05);
    const auto c = closed_form_times(p);
    const auto n = numeric_times(p);
    CHECK(n.source == TimeSource::numeric_derivative);
    CHECK(std::abs(n.Tl_cl / c.Tl_cl - 1) < 0.01);
    CHECK(std::abs(n.Tl_Q / c.Tl_Q - 1) < 0.01);
    CHECK(std::abs(n.M_cl / c.M_cl - 1) < 0.01);
    CHECK(std::abs(n.M_Q / c.M_Q - 1) < 0.01);
}

TEST_CASE("sign structure below mu = 0.1") {
    for (double zeta : {0.02, 0.1, 0.2}) {
        const auto ts = closed_form_times(params(1.0, zeta, 0.02));
        CHECK(ts.mu <= 0.1);
        CHECK(ts.M_cl < 0.0);
        CHECK(ts.M_Q > 0.0);
        CHECK(std::abs(ts.M_Q + 3 * ts.M_cl) <= 10 * ts.mu * ts.mu * std::abs(ts.M_cl));
        const auto n = numeric_times(params(1.0, zeta, 0.02));
        CHECK(n.M_cl < 0.0);
        CHECK(n.M_Q > 0.0);
    }
}

TEST_CASE("modification factors scale as lambda squared in both regimes") {
    for (double zeta : {0.1, 10.0}) {
        const auto lambdas = decade(10);
        std::vector<double> mcl, mq, ccl, cq;
        for (double l : lambdas) {
            const auto n = numeric_times(params(1.0, zeta, l));
            const auto c = closed_form_times(params(1.0, zeta, l));
            mcl.push_back(n.M_cl);
            mq.push_back(n.M_Q);
            ccl.push_back(c.M_cl);
            cq.push_back(c.M_Q);
        }
        CAPTURE(zeta);
        CHECK(std::abs(loglog_slope(lambdas, mcl) - 2.0) <= 0.05);
        CHECK(std::abs(loglog_slope(lambdas, mq) - 2.0) <= 0.05);
        CHECK(std::abs(loglog_slope(lambdas, ccl) - 2.0) <= 1e-12);
        CHECK(std::abs(loglog_slope(lambdas, cq) - 2.0) <= 1e-12);
    }
}

TEST_CASE("case c: classical factor approaches -beta") {
    const auto p = params(1.0, 10.0, 0.01);
    const auto c = closed_form_times(p);
    CHECK(c.regime == Regime::case_c);
    CHECK(c.mu == doctest::Approx(5.0));
    CHECK(c.beta == doctest::Approx(0.5 * 0.004 * 0.004));
    const auto n = numeric_times(p);
    CHECK(std::abs(n.M_cl / -c.beta - 1) < 0.10);
    CHECK(std::abs(n.M_Q / c.M_Q - 1) < 0.01);
    CHECK(std::abs(n.M_cl / c.M_cl - 1) < 0.01);
}

TEST_CASE("beta follows the inverse fourth power of hbar") {
    for (double h : {0.3, 1.0, 2.5}) {
        const double b1 = closed_form_times(params(1.0, 10.0, 0.01, h)).beta;
        const double b2 = closed_form_times(params(1.0, 10.0, 0.01, 2 * h)).beta;
        CHECK(std::abs(b1 / b2 - 16.0) <= 1e-9);
    }
}

TEST_CASE("case identities hold for synthesized factors") {
    for (double a : {1e-6, 3e-3, 0.2}) {
        const auto tb = times_from_factors(2 * kPi, 40 * kPi, -a, 3 * a);
        CHECK(std::abs(case_relations(tb).r_b) <= 1e-12);
        const auto tc = times_from_factors(2 * kPi, 0.8 * kPi, -a, -a);
        CHECK(std::abs(case_relations(tc).r_c) <= 1e-12);
    }
}

TEST_CASE("regime classification") {
    CHECK(classify(params(1.0, 0.0, 0.1)) == Regime::case_a);
    CHECK(classify(params(1.0, 1.0, 0.1)) == Regime::case_b);
    CHECK(classify(params(1.0, 3.0, 0.1)) == Regime::case_c);
    CHECK(classify(params(1.0, 2.0, 0.1)) == Regime::near_singular);
    CHECK(classify(params(1.0, 2.0 * (1 + 1e-8), 0.1)) == Regime::near_singular);
    CHECK(classify(params(1.0, 2.0 * (1 + 1e-5), 0.1)) == Regime::case_c);
    const auto ns = closed_form_times(params(1.0, 2.0 * (1 + 1e-8), 0.1));
    CHECK(ns.regime == Regime::near_singular);
    CHECK(std::isfinite(ns.M_cl));
}

TEST_CASE("open system at omega = 0") {
    const auto ts = closed_form_times(params(0.0, 10.0, 0.01));
    CHECK(ts.open_system);
    CHECK(std::isinf(ts.T0_cl));
    CHECK(std::isinf(ts.mu));
    CHECK(ts.regime == Regime::case_c);
    CHECK(ts.M_cl == doctest::Approx(-ts.beta).epsilon(1e-12));
    CHECK(ts.M_Q == doctest::Approx(-ts.beta).epsilon(1e-12));
}

TEST_CASE("flags for unusual signs") {
    CHECK(closed_form_times(params(1.0, -0.1, 0.05)).unvalidated);
    const auto n = numeric_times(params(-1.0, 0.1, 0.05));
    CHECK(n.negative_frequency);
    CHECK(n.Tl_cl < 0.0);
}

TEST_CASE("a degenerate centre label cannot be differentiated") {
    try {
        numeric_times(params(1.0, 0.5, 0.05));
        FAIL("expected StencilError");
    } catch (const StencilError& e) {
        CHECK(std::string(e.what()).find("unresolvable") != std::string::npos);
    }
    CHECK_THROWS_AS(numeric_times(params(1.0, 0.1, 0.05), 0.0), RangeError);
}

TEST_CASE("automatic label step") {
    CHECK(default_label_step(params(1.0, 10.0, 0.01)) == kDefaultLabelStep);
    CHECK(default_label_step(params(1.0, 0.1, 0.01)) == doctest::Approx(19 * kDefaultLabelStep));
    CHECK(default_label_step(params(1.0, 0.0, 0.01)) == kDefaultLabelStep);
}

TEST_CASE("closed-form and numeric factors converge as lambda squared") {
    for (double zeta : {0.1, 10.0}) {
        auto gap = [&](double l) {
            const auto n = numeric_times(params(1.0, zeta, l));
            const auto c = closed_form_times(params(1.0, zeta, l));
            return std::max(std::abs(n.M_cl / c.M_cl - 1), std::abs(n.M_Q / c.M_Q - 1));
        };
        const double small = gap(1e-3), large = gap(1e-2);
        CAPTURE(zeta);
        CHECK(small < 1e-3);
        CHECK(large / small > 30.0);
    }
}
