#include "bosonchain/scaling.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace bosonchain;
using Catch::Approx;

TEST_CASE("straight-line fit basics") {
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> y{1.0, 3.0, 5.0, 7.0};
    const auto f = detail::linear_fit(x, y);
    CHECK(f.slope == Approx(2.0).margin(1e-12));
    CHECK(f.intercept == Approx(1.0).margin(1e-12));
    CHECK(f.sse == Approx(0.0).margin(1e-20));

    const std::vector<double> sigma{1e-6, 1e-6, 1e6};
    const auto w = detail::linear_fit({0.0, 1.0, 2.0}, {0.0, 1.0, 5.0}, &sigma);
    CHECK(w.slope == Approx(1.0).margin(1e-6));
    CHECK(w.intercept == Approx(0.0).margin(1e-6));

    CHECK_THROWS_AS(detail::linear_fit({1.0}, {2.0}), std::invalid_argument);
    CHECK_THROWS_AS(detail::linear_fit({1.0, 1.0}, {2.0, 3.0}), std::invalid_argument);
    const std::vector<double> bad_sigma{1.0};
    CHECK_THROWS_AS(detail::linear_fit(x, y, &bad_sigma), std::invalid_argument);
}

TEST_CASE("linear interpolation") {
    const std::vector<double> xs{0.0, 1.0, 3.0};
    const std::vector<double> ys{0.0, 2.0, 4.0};
    CHECK(detail::linear_interp(xs, ys, 0.0) == 0.0);
    CHECK(detail::linear_interp(xs, ys, 0.5) == Approx(1.0).margin(1e-14));
    CHECK(detail::linear_interp(xs, ys, 2.0) == Approx(3.0).margin(1e-14));
    CHECK(detail::linear_interp(xs, ys, 3.0) == 4.0);
    CHECK_THROWS_AS(detail::linear_interp(xs, ys, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(detail::linear_interp(xs, ys, 3.1), std::invalid_argument);
}

TEST_CASE("power-law fit against frozen regression values") {
    const std::vector<double> sizes{52.0, 100.0, 152.0, 200.0};
    const std::vector<double> values{0.91, 1.24, 1.55, 1.78};
    const auto out = fit_power_law(sizes, values);
    CHECK(out.fit.params.at("b") == Approx(0.49937392382101153).epsilon(1e-12));
    CHECK(out.fit.params.at("a") == Approx(0.12581353326653583).epsilon(1e-12));
    CHECK(out.fit.stderrs.at("b") == Approx(0.0094802298797207578).epsilon(1e-10));
    CHECK(out.fit.stderrs.at("ln_a") == Approx(0.045001509325651813).epsilon(1e-10));
    CHECK(out.fit.mse == Approx(4.632890891611719e-05).epsilon(1e-10));
    CHECK(out.fit.n_points == 4);
}

TEST_CASE("power-law fit recovers noiseless exponents") {
    std::vector<double> sizes{26.0, 52.0, 100.0, 152.0, 200.0};
    std::vector<double> values;
    for (double L : sizes)
        values.push_back(0.7 * std::pow(L, 0.35));
    const auto out = fit_power_law(sizes, values);
    CHECK(out.fit.params.at("b") == Approx(0.35).margin(1e-12));
    CHECK(out.fit.params.at("a") == Approx(0.7).margin(1e-12));
    CHECK_FALSE(out.log_consistent);

    std::vector<double> flat;
    for (double L : sizes)
        flat.push_back(2.0 + 0.05 * std::log(L));
    const auto alt = fit_power_law(sizes, flat);
    CHECK(std::abs(alt.fit.params.at("b")) < 0.1);
    CHECK(alt.log_consistent);
    CHECK(alt.log_fit.params.at("c") == Approx(0.05).margin(1e-10));
    CHECK(alt.log_fit.params.at("d") == Approx(2.0).margin(1e-10));

    CHECK_THROWS_AS(fit_power_law({10.0, 20.0}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_power_law({10.0, 20.0, 30.0}, {1.0, -2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("central-charge fit recovers the chord profile") {
    const int L = 100;
    const double c_true = 1.3, s0_true = 0.42;
    std::vector<int> cuts;
    std::vector<double> entropies;
    for (int l = 10; l <= 90; l += 10) {
        cuts.push_back(l);
        entropies.push_back(c_true / 3.0 * std::log((L / M_PI) * std::sin(M_PI * l / L)) + s0_true);
    }
    const double s37 = c_true / 3.0 * std::log((L / M_PI) * std::sin(M_PI * 37.0 / L)) + s0_true;
    CHECK(s37 == Approx(1.8823332029647685).epsilon(1e-14));
    const auto fit = fit_central_charge(cuts, entropies, L);
    CHECK(fit.params.at("c") == Approx(c_true).margin(1e-10));
    CHECK(fit.params.at("s0") == Approx(s0_true).margin(1e-10));
    CHECK(fit.mse == Approx(0.0).margin(1e-20));

    CHECK_THROWS_AS(fit_central_charge({1, 2, 3, 4}, {1.0, 1.0, 1.0, 1.0}, L),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_central_charge({0, 10, 20, 30, 40}, std::vector<double>(5, 1.0), L),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_central_charge({30, 30, 30, 30, 30}, std::vector<double>(5, 1.0), L),
                    std::invalid_argument);
}

TEST_CASE("correlation decay classification") {
    std::vector<double> sizes{26.0, 52.0, 100.0, 152.0, 200.0};
    std::vector<double> power, expo;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const double L = sizes[i];
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        power.push_back(sign * 2.3 * std::pow(L, -1.7));
        expo.push_back(sign * 0.9 * std::exp(-L / 17.0));
    }
    const auto p = fit_correlation_exponent(sizes, power);
    CHECK(p.classification == DecayClassification::PowerLaw);
    CHECK(p.power.params.at("p") == Approx(1.7).margin(1e-10));
    CHECK(p.power.params.at("A") == Approx(2.3).margin(1e-9));

    const auto e = fit_correlation_exponent(sizes, expo);
    CHECK(e.classification == DecayClassification::Exponential);
    CHECK(e.exponential.params.at("xi") == Approx(17.0).margin(1e-8));
    CHECK(e.exponential.params.at("B") == Approx(0.9).margin(1e-9));

    CHECK_THROWS_AS(fit_correlation_exponent({10.0, 20.0, 30.0}, {1.0, 0.5, 0.2}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_correlation_exponent(sizes, {1.0, 0.5, 0.0, 0.1, 0.05}),
                    std::invalid_argument);
}

TEST_CASE("rational extrapolation recovers an exact first-order form") {
    const std::vector<double> xs{26.0, 36.0, 52.0, 100.0, 152.0, 200.0};
    std::vector<double> ys;
    for (double x : xs)
        ys.push_back((2.0 + 3.0 * x) / (1.0 + 0.5 * x));
    const auto fit = pade_fit(xs, ys, 1);
    CHECK(fit.order == 1);
    CHECK(fit.num(0) == Approx(2.0).margin(1e-6));
    CHECK(fit.num(1) == Approx(3.0).margin(1e-7));
    CHECK(fit.den(0) == Approx(0.5).margin(1e-8));
    CHECK(fit.asymptote_finite);
    CHECK(fit.asymptote == Approx(6.0).margin(1e-7));
    CHECK_FALSE(fit.singular);
    CHECK(fit.sse < 1e-16);
}

TEST_CASE("rational extrapolation of a 1/L approach") {
    const std::vector<double> xs{26.0, 36.0, 52.0, 72.0, 100.0, 152.0, 200.0};
    std::vector<double> ys;
    for (double x : xs)
        ys.push_back(3.0 - 5.0 / x);
    const auto fit = pade_fit(xs, ys, 1);
    CHECK(fit.asymptote_finite);
    CHECK(fit.asymptote == Approx(3.0).margin(0.05));
    CHECK_FALSE(fit.singular);
}

TEST_CASE("rational extrapolation at second order") {
    const std::vector<double> xs{10.0, 20.0, 35.0, 52.0, 80.0, 120.0, 160.0, 200.0};
    std::vector<double> ys;
    for (double x : xs)
        ys.push_back((1.0 + 2.0 * x + 0.3 * x * x) / (1.0 + 0.1 * x + 0.05 * x * x));
    const auto fit = pade_fit(xs, ys, 2);
    CHECK(fit.asymptote_finite);
    CHECK(fit.asymptote == Approx(6.0).margin(1e-4));
    CHECK_FALSE(fit.singular);
}

TEST_CASE("rational fit flags a pole inside the data") {
    const std::vector<double> xs{26.0, 52.0, 100.0, 152.0, 200.0};
    std::vector<double> ys;
    for (double x : xs)
        ys.push_back(1.0 / (1.0 - x / 120.0));
    const auto fit = pade_fit(xs, ys, 1);
    CHECK(fit.singular);
}

TEST_CASE("rational fit input validation and root finding") {
    CHECK_THROWS_AS(pade_fit({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}, 0), std::invalid_argument);
    CHECK_THROWS_AS(pade_fit({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}, 1), std::invalid_argument);

    Eigen::VectorXd b1(1);
    b1 << 0.5;
    const auto r1 = detail::real_denominator_roots(b1);
    REQUIRE(r1.size() == 1);
    CHECK(r1[0] == Approx(-2.0).margin(1e-10));

    Eigen::VectorXd b2(2);
    b2 << -3.0, 2.0;  // 1 - 3x + 2x^2 = (1 - x)(1 - 2x)
    auto r2 = detail::real_denominator_roots(b2);
    std::sort(r2.begin(), r2.end());
    REQUIRE(r2.size() == 2);
    CHECK(r2[0] == Approx(0.5).margin(1e-10));
    CHECK(r2[1] == Approx(1.0).margin(1e-10));
}

TEST_CASE("crossing of size-resolved curves") {
    SizedCurve a{52, {0.5, 1.5}, {1.0, 1.0}};
    SizedCurve b{100, {0.5, 1.5}, {0.5, 1.5}};
    SizedCurve c{152, {0.5, 1.5}, {0.2, 2.2}};
    const auto res = crossing_point({a, b, c});
    REQUIRE(res.pairwise.size() == 2);
    CHECK(res.pairwise[0] == Approx(1.0).margin(1e-12));
    CHECK(res.pairwise[1] == Approx(0.8).margin(1e-12));
    CHECK(res.mean == Approx(0.9).margin(1e-12));
    CHECK(res.spread == Approx(0.1).margin(1e-12));
}

TEST_CASE("crossing detection on a shared intersection point") {
    std::vector<SizedCurve> curves;
    for (int L : {52, 100, 152}) {
        SizedCurve c;
        c.size = L;
        for (double ctrl : {0.5, 0.7, 1.0, 1.2})
            c.control.push_back(ctrl);
        for (double ctrl : c.control)
            c.value.push_back((ctrl - 0.9) * std::log(static_cast<double>(L)));
        curves.push_back(std::move(c));
    }
    const auto res = crossing_point(curves);
    CHECK(res.mean == Approx(0.9).margin(1e-12));
    CHECK(res.spread == Approx(0.0).margin(1e-12));
}

TEST_CASE("crossing errors") {
    SizedCurve a{52, {0.5, 1.5}, {0.0, 0.0}};
    SizedCurve b{100, {0.5, 1.5}, {1.0, 1.0}};
    CHECK_THROWS_AS(crossing_point({a, b}), std::invalid_argument);
    SizedCurve c{100, {2.0, 3.0}, {0.0, 1.0}};
    CHECK_THROWS_AS(crossing_point({a, c}), std::invalid_argument);
    CHECK_THROWS_AS(crossing_point({a}), std::invalid_argument);
    SizedCurve bad{10, {1.0, 0.5}, {0.0, 1.0}};
    CHECK_THROWS_AS(crossing_point({a, bad}), std::invalid_argument);
}

TEST_CASE("critical-column subtraction") {
    SizedCurve c{52, {0.0, 1.0, 2.0}, {1.0, 2.0, 4.0}};
    const auto out = subtract_critical_column({c}, 1.5);
    REQUIRE(out.size() == 1);
    CHECK(out[0].value[0] == Approx(-2.0).margin(1e-14));
    CHECK(out[0].value[1] == Approx(-1.0).margin(1e-14));
    CHECK(out[0].value[2] == Approx(1.0).margin(1e-14));
}

namespace {

double master_poly(double x) { return x + 0.2 * x * x * x - 0.05 * std::pow(x, 5); }

std::vector<SizedCurve> synthetic_curves(double critical, double nu, bool bkt) {
    std::vector<SizedCurve> curves;
    for (int L : {52, 100, 200}) {
        SizedCurve c;
        c.size = L;
        const double scale = bkt ? std::log(static_cast<double>(L)) * std::log(static_cast<double>(L))
                                 : std::pow(static_cast<double>(L), 1.0 / nu);
        for (int i = 0; i <= 24; ++i) {
            const double ctrl = critical - 0.2 + 0.4 * i / 24.0;
            c.control.push_back(ctrl);
            c.value.push_back(master_poly((ctrl - critical) * scale * 0.25));
        }
        curves.push_back(std::move(c));
    }
    return curves;
}

}  // namespace

TEST_CASE("scaling collapse recovers an algebraic exponent") {
    const auto curves = synthetic_curves(1.0, 4.0, false);
    CollapseOptions opt;
    opt.critical_min = 0.9;
    opt.critical_max = 1.1;
    opt.critical_steps = 21;
    opt.nu_min = 1.0;
    opt.nu_max = 16.0;
    opt.nu_steps = 9;  // hits 4 exactly on the log grid
    const auto res = data_collapse(curves, opt);
    CHECK(res.reference_size == 100);
    CHECK(res.critical == Approx(1.0).margin(1e-9));
    CHECK(res.nu == Approx(4.0).margin(1e-9));
    CHECK(res.mse_min < 1e-18);
    CHECK_FALSE(res.contour_touches_boundary);
    CHECK(res.landscape.size() > 100);

    CollapseOptions bkt = opt;
    bkt.ansatz = CollapseAnsatz::BKT;
    const auto alt = data_collapse(curves, bkt);
    CHECK(res.mse_min < alt.mse_min);
}

TEST_CASE("scaling collapse identifies a logarithmic transition") {
    const auto curves = synthetic_curves(0.5, 0.0, true);
    CollapseOptions opt;
    opt.ansatz = CollapseAnsatz::BKT;
    opt.critical_min = 0.4;
    opt.critical_max = 0.6;
    opt.critical_steps = 21;
    const auto res = data_collapse(curves, opt);
    CHECK(res.critical == Approx(0.5).margin(1e-9));
    CHECK(std::isnan(res.nu));
    CHECK(res.nu_uncertainty == 0.0);
    CHECK(res.mse_min < 1e-18);

    CollapseOptions alg = opt;
    alg.ansatz = CollapseAnsatz::Algebraic;
    alg.nu_min = 1.0;
    alg.nu_max = 16.0;
    alg.nu_steps = 17;
    const auto alt = data_collapse(curves, alg);
    CHECK(res.mse_min < alt.mse_min);
}

TEST_CASE("collapse flags a boundary-limited exponent grid") {
    const auto curves = synthetic_curves(1.0, 4.0, false);
    CollapseOptions opt;
    opt.critical_min = 0.9;
    opt.critical_max = 1.1;
    opt.critical_steps = 11;
    opt.nu_min = 20.0;
    opt.nu_max = 100.0;
    opt.nu_steps = 9;
    const auto res = data_collapse(curves, opt);
    CHECK(res.contour_touches_boundary);
}

TEST_CASE("collapse input validation") {
    const auto curves = synthetic_curves(1.0, 4.0, false);
    CollapseOptions opt;
    opt.critical_min = 0.9;
    opt.critical_max = 1.1;
    CHECK_THROWS_AS(data_collapse({curves[0], curves[1]}, opt), std::invalid_argument);
    CollapseOptions bad = opt;
    bad.critical_max = 0.8;
    CHECK_THROWS_AS(data_collapse(curves, bad), std::invalid_argument);
    CollapseOptions deg = opt;
    deg.degree = 40;
    CHECK_THROWS_AS(data_collapse(curves, deg), std::invalid_argument);
}
