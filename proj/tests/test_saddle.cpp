#include <catch2/catch_amalgamated.hpp>

#include "amsq/saddle.hpp"
#include "common.hpp"

using namespace amsq;
using testutil::paper_model;
using testutil::rel_err;

TEST_CASE("curves: anchor values") {
    Model m = paper_model();
    CHECK(std::fabs(curve_y0(m, m.d.gamma)) < 1e-14);
    CHECK(std::fabs(curve_y1(m, m.d.gamma)) < 1e-12);
    // Y2 > 0 on (gamma, 1]
    for (double z = m.d.gamma + 0.01; z <= 1.0; z += 0.05) CHECK(curve_y2(m, z) > 0.0);
    // Y0(1) equals the linear coefficient of the small-theta mu expansion
    double y01 = (m.d.rho * (std::log(m.d.rho) - 1) + 1) /
                 ((1 + m.lambda()) * (1 + m.lambda()));
    CHECK(rel_err(curve_y0(m, 1.0), y01) < 1e-12);
    // Y2(1) equals mu''(0)
    CHECK(rel_err(curve_y2(m, 1.0), mu_second(m, 0.0)) < 1e-6);
    // optional curves live only on their domains
    CHECK_FALSE(curves(m, 0.99).y1.has_value());
    CHECK(curves(m, 0.6).y1.has_value());
    CHECK(curves(m, 0.6).ystar.has_value());
    CHECK_FALSE(curves(m, 0.3).ystar.has_value());
}

TEST_CASE("Y*(z) = 1/N is crossed at the table transition point") {
    Model m = paper_model();
    double lo = m.d.gamma + 1e-4, hi = m.d.gamma * m.d.gamma / m.d.delta - 1e-4;
    double z = find_root([&](double zz) { return curve_ystar(m, zz) - 0.05; }, lo, hi);
    CHECK(std::fabs(z - 0.4811) < 5e-4);
}

TEST_CASE("solve_theta: zero on the transition curve, table values") {
    Model m = paper_model();
    for (double z : {0.55, 0.7, 0.9}) {
        auto r = solve_theta(m, curve_y0(m, z), z);
        CHECK(std::fabs(r.theta) < 1e-8);
    }
    CHECK(std::fabs(solve_theta(m, 0.05, 0.6).theta - (-0.2175)) < 1e-3);
    CHECK(std::fabs(solve_theta(m, 0.05, 0.85).theta - 5.921) < 1e-3);
    // sign change across y = Y0(z)
    for (double z : {0.6, 0.8}) {
        double y0 = curve_y0(m, z);
        CHECK(solve_theta(m, y0 - 1e-3, z).theta > 0.0);
        CHECK(solve_theta(m, y0 + 1e-3, z).theta < 0.0);
    }
}

TEST_CASE("solve_theta residuals are tiny") {
    Model m = paper_model();
    for (double z : {0.5, 0.65, 0.85}) {
        for (double y : {0.02, 0.05, 0.2}) {
            // near saddle coalescence the finite-difference noise floor in
            // the defining equation rises; stay one margin away
            if (in_coalescence_window(m, z) && y > curve_ystar(m, z) - 5e-3) continue;
            auto r = solve_theta(m, y, z);
            CHECK(std::fabs(r.residual) < 1e-9);
        }
    }
}

TEST_CASE("solve_theta_plus: continuity at the coalescence curve") {
    Model m = paper_model();
    double z = 0.48;
    double ys = curve_ystar(m, z);
    double ts = theta_star(m, z);
    // both solvers return the coalesced value inside the guard band
    auto a = solve_theta(m, ys - 5e-5, z);
    auto b = solve_theta_plus(m, ys + 5e-5, z);
    CHECK(a.near_coalescence);
    CHECK(b.near_coalescence);
    CHECK(rel_err(a.theta, ts) < 1e-6);
    CHECK(rel_err(b.theta, ts) < 1e-6);
    // just outside the band the roots approach theta* from both sides
    auto c = solve_theta(m, ys - 2e-3, z);
    auto d = solve_theta_plus(m, ys + 2e-3, z);
    CHECK(c.theta > ts);
    CHECK(d.theta > ts);
    CHECK(std::fabs(c.theta - ts) < 0.05);
    CHECK(std::fabs(d.theta - ts) < 0.05);
}

TEST_CASE("solve_theta_plus: table values and the y -> 0 limit for z < gamma") {
    Model m = paper_model();
    CHECK(std::fabs(solve_theta_plus(m, 0.05, 0.15).theta - (-3.994)) < 1e-3);
    CHECK(std::fabs(solve_theta_plus(m, 0.05, 0.45).theta - (-4.411)) < 1e-3);
    for (double z : {0.1, 0.25, 0.3}) {
        auto r = solve_theta_plus(m, 0.0, z);
        CHECK(std::isfinite(r.theta));
        CHECK(r.theta < m.d.theta0);
        // continuity in y near 0 (the root moves with slope -1/Psi_tt,
        // which steepens as z approaches gamma)
        CHECK(std::fabs(solve_theta_plus(m, 1e-6, z).theta - r.theta) < 5e-3);
    }
}

TEST_CASE("solve_theta0: range and limits") {
    Model m = paper_model();
    auto near0 = solve_theta0(m, 1e-6);
    auto big = solve_theta0(m, 200.0);
    CHECK(near0.theta < m.d.theta0);
    CHECK(big.theta < m.d.theta0);
    CHECK(std::fabs(big.theta - m.d.theta0) < 1e-2);
    // monotone in y
    double prev = near0.theta;
    for (double y : {0.05, 0.2, 1.0, 5.0, 25.0}) {
        double t = solve_theta0(m, y).theta;
        CHECK(t > prev);
        prev = t;
    }
    // matches the reference Theta column at k = 0
    CHECK(std::fabs(solve_theta0(m, 0.05).theta - (-3.418)) < 1e-3);
}

TEST_CASE("solve_theta1: zero at Y0(1), limits, region IV sign") {
    Model m = paper_model();
    double y01 = curve_y0(m, 1.0);
    CHECK(std::fabs(solve_theta1(m, y01).theta) < 1e-8);
    CHECK(std::fabs(solve_theta1(m, 0.05).theta - 9.269) < 1e-3);
    CHECK(std::fabs(solve_theta1(m, 150.0).theta - m.d.theta0) < 2e-2);
    for (double y : {0.05, 0.1, 0.2})
        CHECK(solve_theta1(m, y).theta > 0.0);
    for (double y : {0.3, 0.5})
        CHECK(solve_theta1(m, y).theta < 0.0);
}

TEST_CASE("classify: layers and interior regions") {
    Model m = paper_model();
    double g = m.d.gamma;
    // z within 1/N of 1, y below Y0(1) outside the corner width -> IV.
    // At N = 20 the default corner-V band covers most of the strip, so a
    // one-sigma band is used to expose IV; VIII claims x = O(1)
    ClassifyConfig narrow;
    narrow.transition_mult = 1.0;
    CHECK(classify(m, 0.12, 0.99, narrow).tag == RegionTag::IV);
    CHECK(classify(m, 1.5, 0.99).tag == RegionTag::VI);
    CHECK(classify(m, curve_y0(m, 1.0), 0.99).tag == RegionTag::V);
    CHECK(classify(m, 0.01, 0.99).tag == RegionTag::VIII);
    // transition layer around Y0
    double z = 0.8;
    CHECK(classify(m, curve_y0(m, z), z).tag == RegionTag::II);
    double w = 3.0 * std::sqrt(curve_y2(m, z) / m.n());
    CHECK(classify(m, curve_y0(m, z) + 2.0 * w, z).tag == RegionTag::R2);
    // the default band swallows all of R1 at N = 20; shrink it to see R1
    ClassifyConfig tight;
    tight.transition_mult = 0.5;
    double wt = 0.5 * std::sqrt(curve_y2(m, z) / m.n());
    CHECK(classify(m, curve_y0(m, z) - 2.0 * wt, z, tight).tag == RegionTag::R1);
    // interior R3 below gamma and beyond Y*
    CHECK(classify(m, 0.3, 0.2).tag == RegionTag::R3);
    CHECK(classify(m, curve_ystar(m, 0.45) + 0.05, 0.45).tag == RegionTag::R3);
    // boundary strips
    CHECK(classify(m, 0.5, 0.01).tag == RegionTag::III);
    CHECK(classify(m, 0.01, 0.7).tag == RegionTag::VII);
    CHECK(classify(m, 0.01, 0.999).tag == RegionTag::VIII);
    CHECK(classify(m, 0.001, g + 0.2 / m.n()).tag == RegionTag::I);
    // widths are configurable
    ClassifyConfig cfg;
    cfg.transition_mult = 0.0;
    CHECK(classify(m, curve_y0(m, z) + 1e-6, z, cfg).tag == RegionTag::R2);
}

TEST_CASE("classify of the reference table point (y, z) = (0.05, 0.6)") {
    // Y0(0.6) = 0.047 < 0.05, so the point sits just above the transition
    // curve, inside the default Region II band around it
    Model m = paper_model();
    double y0 = curve_y0(m, 0.6);
    CHECK(y0 < 0.05);
    auto v = classify(m, 0.05, 0.6);
    CHECK(v.tag == RegionTag::II);
    ClassifyConfig narrow;
    narrow.transition_mult = 0.1;
    CHECK(classify(m, 0.05, 0.6, narrow).tag == RegionTag::R2);
}
