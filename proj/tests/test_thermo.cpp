#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "cpdq/thermo.hpp"

using namespace cpdq;
using doctest::Approx;

namespace {

const Constants kNat = Constants::natural();

PistonConfig expansion(double u, double L_end = 2.0)
{
    PistonConfig cfg;
    cfg.wall_speed = u;
    cfg.L_end = L_end;
    return cfg;
}

PistonConfig jump(double L_end)
{
    PistonConfig cfg;
    cfg.mode = PistonMode::sudden_jump;
    cfg.L_end = L_end;
    return cfg;
}

PistonConfig static_box()
{
    PistonConfig cfg;
    cfg.wall_speed = 0.0;
    cfg.t_end = 25.0;
    return cfg;
}

}  // namespace

TEST_CASE("config validation")
{
    auto bad = expansion(1.0);
    CHECK_THROWS_AS(piston_simulate(bad, kNat), PreconditionError);
    bad = expansion(0.1);
    bad.L0 = 0.0;
    CHECK_THROWS_AS(piston_simulate(bad, kNat), PreconditionError);
    bad = expansion(-0.1);
    CHECK_THROWS_AS(piston_simulate(bad, kNat), PreconditionError);  // shrinking never reaches L_end = 2
    PistonConfig none;
    none.wall_speed = 0.1;
    CHECK_THROWS_AS(piston_simulate(none, kNat), PreconditionError);
    PistonConfig j;
    j.mode = PistonMode::sudden_jump;
    CHECK_THROWS_AS(piston_simulate(j, kNat), PreconditionError);
}

TEST_CASE("sudden jump doubles f at fixed p")
{
    const auto rec = piston_simulate(jump(2.0), kNat);
    REQUIRE(rec.points() >= 3);
    CHECK(rec.p.front() == rec.p.back());
    CHECK(rec.f[1] == Approx(2.0 * rec.f[0]).epsilon(1e-15));
    CHECK(rec.S.back() - rec.S.front() == Approx(kNat.k_boltz * std::log(2.0)).epsilon(1e-14));
    CHECK(rec.events[1].kind == PistonEventKind::jump);
    CHECK(rec.t[1] == rec.t[0]);
}

TEST_CASE("free expansion entropy is exact for any ratio")
{
    for (double r : {1.1, 1.5, 3.0, 10.0, 0.5}) {
        const auto rec = piston_simulate(jump(r), kNat);
        CHECK(std::abs((rec.S.back() - rec.S.front()) - kNat.k_boltz * std::log(r)) <= 1e-14);
    }
}

TEST_CASE("static box keeps p L fixed")
{
    const auto rec = piston_simulate(static_box(), kNat);
    REQUIRE(rec.points() >= 3);
    for (std::size_t i = 0; i < rec.points(); ++i) {
        CHECK(rec.f[i] == rec.f[0]);
        CHECK(rec.S[i] == rec.S[0]);
    }
    const auto heat = heat_theorem_residual(rec, kNat);
    for (std::size_t i = 0; i < heat.residual.size(); ++i) {
        CHECK(heat.residual[i] == 0.0);
        CHECK(heat.log_residual[i] == 0.0);
    }
    const auto ts = extended_quantities(rec, kNat);
    for (std::size_t i = 0; i < ts.dA_ext.size(); ++i) {
        CHECK(ts.dA_ext[i] == 0.0);
        CHECK(ts.dS[i] == 0.0);
        CHECK(ts.f_rate[i] == 0.0);
        CHECK(ts.L_ext_rate[i] == 0.0);
    }
}

TEST_CASE("bounce map and wall kinematics")
{
    const double u = 0.05;
    const auto rec = piston_simulate(expansion(u), kNat);
    double last_moving = rec.cfg.v0;
    std::size_t hits = 0;
    for (std::size_t i = 1; i < rec.events.size(); ++i) {
        const auto& e = rec.events[i];
        CHECK(e.t >= rec.events[i - 1].t);
        CHECK(e.L == Approx(rec.cfg.L0 + u * e.t).epsilon(1e-13));
        if (e.kind == PistonEventKind::moving_wall) {
            CHECK(e.speed == Approx(last_moving - 2.0 * u).epsilon(1e-13));
            last_moving = e.speed;
            ++hits;
        } else if (e.kind == PistonEventKind::fixed_wall) {
            CHECK(e.speed == rec.events[i - 1].speed);
        }
    }
    CHECK(hits >= 2);
    CHECK(rec.L.back() >= 2.0);
}

TEST_CASE("product identity at every record point")
{
    const auto rec = piston_simulate(expansion(0.02), kNat);
    for (std::size_t i = 0; i < rec.points(); ++i) {
        CHECK(rec.f[i] == rec.p[i] * rec.L[i]);
        CHECK(rec.S[i] == Approx(kNat.k_boltz * std::log(rec.f[i] / kNat.f_ref)));
    }
    const auto heat = heat_theorem_residual(rec, kNat);
    for (double r : heat.log_residual) {
        CHECK(std::abs(r) <= 1e-12);
    }
}

TEST_CASE("slow expansion is adiabatic")
{
    const auto rec = piston_simulate(expansion(1e-3), kNat);
    CHECK(std::abs(delta_ln_pL_at(rec, 2.0)) <= 5e-3);

    const auto heat = heat_theorem_residual(rec, kNat);
    for (std::size_t i = 0; i < heat.residual.size(); ++i) {
        CHECK(std::abs(heat.residual[i]) <= 1e-3 * std::abs(heat.dE[i]));
    }
    for (double r : heat.log_residual) {
        CHECK(std::abs(r) <= 1e-12);
    }

    const auto ts = extended_quantities(rec, kNat);
    CHECK(std::abs(ts.action_over_f - ts.entropy_over_k) <= 1e-2 * std::abs(ts.entropy_over_k));
    for (std::size_t i = 0; i < ts.dVol.size(); ++i) {
        CHECK(ts.dVol[i] > 0.0);
    }
    SUBCASE("energy bookkeeping: dE = -P dVol in total")
    {
        double dE = 0.0, work = 0.0;
        for (std::size_t i = 0; i < ts.dE.size(); ++i) {
            dE += ts.dE[i];
            work += ts.P[i] * ts.dVol[i];
        }
        CHECK(dE < 0.0);
        CHECK(std::abs(dE + work) <= 1e-2 * std::abs(dE));
    }
}

TEST_CASE("compression reverses the sign of dVol")
{
    auto cfg = expansion(-1e-2, 0.5);
    const auto rec = piston_simulate(cfg, kNat);
    const auto ts = extended_quantities(rec, kNat);
    for (std::size_t i = 0; i < ts.dVol.size(); ++i) {
        CHECK(ts.dVol[i] < 0.0);
        CHECK(ts.dE[i] > 0.0);
    }
    CHECK(rec.p.back() > rec.p.front());
}

TEST_CASE("jump interval: fdot and entropy sides agree")
{
    const auto rec = piston_simulate(jump(2.0), kNat);
    const auto ts = extended_quantities(rec, kNat);
    REQUIRE(ts.dt.front() == 0.0);
    CHECK(std::isnan(ts.f_rate.front()));
    CHECK(ts.err_fdot.front() <= 1e-2);
    CHECK(ts.err_entropy.front() <= 1e-2);
    CHECK(std::abs(ts.action_over_f - ts.entropy_over_k) <= 1e-2 * std::abs(ts.entropy_over_k));
}

TEST_CASE("extended quantities on a slow expansion, per interval")
{
    const auto rec = piston_simulate(expansion(1e-3), kNat);
    const auto ts = extended_quantities(rec, kNat);
    for (std::size_t i = 0; i < ts.dt.size(); ++i) {
        if (std::abs(ts.dA_ext[i]) > 0.0) {
            CHECK(std::abs(ts.dA_ext[i] - ts.df[i]) <= 1e-2 * std::abs(ts.df[i]) + 1e-15);
        }
    }
}

TEST_CASE("adiabatic scan")
{
    PistonConfig tmpl;
    tmpl.L_end = 2.0;
    SUBCASE("very slow")
    {
        const auto scan = adiabatic_scan({1e-4}, tmpl, kNat);
        CHECK(scan.rows[0].delta_ln_pL <= 1e-3);
        REQUIRE(scan.largest_ratio_below);
        CHECK(*scan.largest_ratio_below == 1e-4);
    }
    SUBCASE("fast")
    {
        const auto scan = adiabatic_scan({0.3}, tmpl, kNat);
        CHECK(scan.rows[0].delta_ln_pL >= 0.05);
        CHECK_FALSE(scan.largest_ratio_below);
    }
    SUBCASE("monotone, unordered input")
    {
        const std::vector<double> ratios{0.1, 0.0, 3e-3, 0.15, 1e-3, 0.03, 1e-2, 0.2, 1e-4};
        const auto scan = adiabatic_scan(ratios, tmpl, kNat);
        CHECK(scan.monotone);
        REQUIRE(scan.rows.size() == ratios.size());
        auto rows = scan.rows;
        std::sort(rows.begin(), rows.end(), [](const ScanRow& a, const ScanRow& b) { return a.ratio < b.ratio; });
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i].delta_ln_pL + 1e-12 >= rows[i - 1].delta_ln_pL);
        }
        CHECK(rows.front().delta_ln_pL == 0.0);
        REQUIRE(scan.largest_ratio_below);
        CHECK(*scan.largest_ratio_below < 0.1);
    }
    SUBCASE("few-bounce regime above u/v = 1/4 is not monotone")
    {
        // Two or three wall hits per doubling; the exact map gives 0.274 at 0.2 and 0.250 at 0.3.
        const auto scan = adiabatic_scan({0.2, 0.3}, tmpl, kNat);
        CHECK(scan.rows[0].delta_ln_pL == Approx(0.27364).epsilon(1e-4));
        CHECK(scan.rows[1].delta_ln_pL == Approx(0.24954).epsilon(1e-4));
        CHECK_FALSE(scan.monotone);
        CHECK_THROWS_AS(adiabatic_scan({0.25}, tmpl, kNat), ModelViolationError);
    }
    SUBCASE("violation is first order in u/v")
    {
        const auto scan = adiabatic_scan({1e-3, 1e-2}, tmpl, kNat);
        const double ratio = scan.rows[1].delta_ln_pL / scan.rows[0].delta_ln_pL;
        CHECK(ratio >= 3.0);
        CHECK(ratio <= 30.0);
    }
    CHECK_THROWS_AS(adiabatic_scan({1.0}, tmpl, kNat), PreconditionError);
}

TEST_CASE("wall outrunning the particle is a model violation")
{
    auto cfg = expansion(0.6, 8.0);
    CHECK_THROWS_AS(piston_simulate(cfg, kNat), ModelViolationError);
}

TEST_CASE("record-count preconditions")
{
    PistonRecord empty;
    CHECK_THROWS_AS(heat_theorem_residual(empty, kNat), PreconditionError);
    CHECK_THROWS_AS(extended_quantities(empty, kNat), PreconditionError);
    CHECK_THROWS_AS(delta_ln_pL_at(empty, 2.0), PreconditionError);
}
