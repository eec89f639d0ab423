#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"

#include "cpdq/info.hpp"

using namespace cpdq;
using doctest::Approx;

namespace {

const Constants kNat = Constants::natural();

PistonConfig expansion(double u)
{
    PistonConfig cfg;
    cfg.wall_speed = u;
    cfg.L_end = 2.0;
    return cfg;
}

}  // namespace

TEST_CASE("zero information exchange on conservative trajectories")
{
    const double duration = 20.0 * kPi;
    struct Fixture {
        Potential pot;
        double q0;
        double p0;
        double dt;
    };
    const Fixture fixtures[] = {{HarmonicPotential{1.0, 1.0}, 1.0, 0.0, 1e-3},
                                {HarmonicPotential{2.0, 0.5}, -0.3, 1.2, 1e-3},
                                {SoftWell{5.0, 1.0}, 0.0, 1.5, 5e-4}};
    for (const auto& fx : fixtures) {
        const auto n = static_cast<std::size_t>(duration / fx.dt);
        const auto rec = integrate_hamilton(fx.pot, fx.q0, fx.p0, {fx.dt, n}, kNat);
        const auto led = info_ledger(rec, kNat);
        CAPTURE(potential_name(fx.pot));
        REQUIRE(led.dI_q.size() == n);
        CHECK(std::abs(led.total()) <= 1e-6);
        double worst = 0.0;
        std::size_t valid = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (led.valid[i]) {
                ++valid;
                worst = std::max(worst, std::abs(led.dI_q[i] + led.dI_p[i]));
                CHECK(led.tau[i] > 0.0);
            } else {
                CHECK(led.dI_q[i] == 0.0);
                CHECK(led.dI_p[i] == 0.0);
            }
        }
        CHECK(valid > n / 2);
        CHECK(valid < n);
        CHECK(worst <= 1e-6);
        CHECK(led.I_cumulative.size() == n);
    }
}

TEST_CASE("leftover exchange is second order in the step")
{
    const double duration = 20.0 * kPi;
    double prev = 0.0;
    for (double dt : {2e-3, 1e-3, 5e-4}) {
        const auto n = static_cast<std::size_t>(duration / dt);
        const double total = std::abs(info_ledger(integrate_hamilton(SoftWell{5.0, 1.0}, 0.0, 1.5, {dt, n}, kNat), kNat).total());
        if (prev > 0.0) {
            CHECK(prev / total == Approx(4.0).epsilon(0.2));
        }
        prev = total;
    }
}

TEST_CASE("free particle exchanges nothing")
{
    const auto rec = integrate_hamilton(FreePotential{}, 0.0, 1.3, {1e-2, 200}, kNat);
    const auto led = info_ledger(rec, kNat);
    for (std::size_t i = 0; i < led.dI_q.size(); ++i) {
        CHECK(led.valid[i]);
        CHECK(led.dI_q[i] == 0.0);
        CHECK(led.dI_p[i] == 0.0);
        CHECK(led.tau[i] == Approx(kNat.f / (1.3 * 1.3)));
    }
    CHECK(led.total() == 0.0);
    const auto rm = regime_metrics(led);
    CHECK(rm.mean_abs_dI == 0.0);
    CHECK(regime_classify(rm).label == RegimeLabel::classical_mechanics_or_adiabatic_eq);

    const auto rest = integrate_hamilton(FreePotential{}, 0.0, 0.0, {1e-2, 20}, kNat);
    CHECK_THROWS_AS(info_ledger(rest, kNat), ComputationError);
}

TEST_CASE("sudden expansion costs one bit")
{
    PistonConfig cfg;
    cfg.mode = PistonMode::sudden_jump;
    cfg.L_end = 2.0;
    const auto rec = piston_simulate(cfg, kNat);
    const auto led = info_ledger(rec, kNat);
    CHECK(led.total() == Approx(-1.0).epsilon(1e-12));
    CHECK(led.dI_q[0] == Approx(-1.0));
    CHECK(led.dI_p[0] == 0.0);
    CHECK(led.dt[0] == 0.0);
}

TEST_CASE("piston ledger matches the entropy change")
{
    std::vector<PistonRecord> recs;
    for (double u : {1e-3, 1e-2, 0.1, 0.3}) {
        recs.push_back(piston_simulate(expansion(u), kNat));
    }
    PistonConfig comp;
    comp.wall_speed = -0.05;
    comp.L_end = 0.5;
    recs.push_back(piston_simulate(comp, kNat));
    PistonConfig still;
    still.t_end = 20.0;
    recs.push_back(piston_simulate(still, kNat));
    for (const auto& rec : recs) {
        const auto led = info_ledger(rec, kNat);
        const double dS = rec.S.back() - rec.S.front();
        CHECK(std::abs(led.total() + dS / (kNat.k_boltz * std::log(2.0))) <= 1e-3);
    }
    CHECK_THROWS_AS(info_ledger(PistonRecord{}, kNat), ComputationError);
}

TEST_CASE("regime classification table")
{
    const RegimeThresholds th{1e-6, 0.1};
    CHECK(regime_classify({1e-9, 0.01, 0.01}, th).label == RegimeLabel::classical_mechanics_or_adiabatic_eq);
    CHECK(regime_classify({1e-9, 0.5, 0.01}, th).label == RegimeLabel::quantum_mechanics);
    CHECK(regime_classify({1e-9, 0.01, 0.5}, th).label == RegimeLabel::quantum_mechanics);
    CHECK(regime_classify({0.3, 0.01, 0.01}, th).label == RegimeLabel::nonadiabatic_equilibrium_td);
    CHECK(regime_classify({0.3, 0.5, 0.01}, th).label == RegimeLabel::nonadiabatic_nonequilibrium);
    const auto defaults = RegimeThresholds{};
    CHECK(defaults.tol_zero == 1e-6);
    CHECK(defaults.tol_small == 0.1);
    CHECK(regime_label_name(RegimeLabel::quantum_mechanics) == "quantum_mechanics");
    CHECK(regime_label_name(RegimeLabel::nonadiabatic_nonequilibrium) == "nonadiabatic_nonequilibrium");
    CHECK_THROWS_AS(regime_classify({-1.0, 0.0, 0.0}), PreconditionError);
    CHECK_THROWS_AS(regime_classify({0.0, std::numeric_limits<double>::quiet_NaN(), 0.0}), PreconditionError);
}

TEST_CASE("classifier is deterministic over the quadrant grid")
{
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> lo(-12.0, -7.0), hi(-0.5, 1.0), small(-5.0, -1.5), big(-0.9, 1.0);
    const RegimeThresholds th{};
    for (int quad = 0; quad < 4; ++quad) {
        const bool zero = quad < 2;
        const bool tiny = quad % 2 == 0;
        const RegimeLabel expected[] = {RegimeLabel::classical_mechanics_or_adiabatic_eq, RegimeLabel::quantum_mechanics,
                                        RegimeLabel::nonadiabatic_equilibrium_td,
                                        RegimeLabel::nonadiabatic_nonequilibrium};
        for (int k = 0; k < 50; ++k) {
            const RegimeMetrics m{std::pow(10.0, zero ? lo(rng) : hi(rng)), std::pow(10.0, tiny ? small(rng) : big(rng)),
                                  std::pow(10.0, small(rng))};
            const auto a = regime_classify(m, th);
            const auto b = regime_classify(m, th);
            CHECK(a.label == b.label);
            CHECK(a.label == expected[quad]);
        }
    }
}

TEST_CASE("regime metrics")
{
    SUBCASE("zero-duration steps count whole")
    {
        InfoLedger led;
        led.dI_q = {-1.0, 0.0};
        led.dI_p = {0.0, 0.0};
        led.valid = {true, false};
        led.dt = {0.0, 1.0};
        led.tau = {0.5, 0.0};
        const auto rm = regime_metrics(led);
        CHECK(rm.mean_abs_dI == 1.0);
        CHECK(rm.max_step_dI_q == 1.0);
        CHECK(rm.max_step_dI_p == 0.0);
    }
    SUBCASE("timed steps rescaled to one crossing")
    {
        InfoLedger led;
        led.dI_q = {0.2};
        led.dI_p = {-0.2};
        led.valid = {true};
        led.dt = {0.1};
        led.tau = {0.05};
        const auto rm = regime_metrics(led);
        CHECK(rm.mean_abs_dI == 0.0);
        CHECK(rm.max_step_dI_q == Approx(0.1));
        CHECK(rm.max_step_dI_p == Approx(0.1));
    }
    SUBCASE("no valid step")
    {
        InfoLedger led;
        led.dI_q = {0.0};
        led.dI_p = {0.0};
        led.valid = {false};
        led.dt = {1.0};
        led.tau = {0.0};
        CHECK_THROWS_AS(regime_metrics(led), ComputationError);
    }
    SUBCASE("WKB profile of a free particle")
    {
        const auto w = local_wkb_profile(FreePotential{}, 1.0, Grid1D(-1.0, 1.0, 101), kNat);
        const auto rm = regime_metrics(w);
        CHECK(rm.mean_abs_dI == 0.0);
        CHECK(rm.max_step_dI_q == 0.0);
    }
    SUBCASE("WKB profile of a shallow ground state is quantum")
    {
        const Grid1D g(-10.0, 10.0, 2001);
        const double E = solve_tise(SoftWell{5.0, 1.0}, g, 1, kNat).energies[0];
        const auto rm = regime_metrics(local_wkb_profile(SoftWell{5.0, 1.0}, E, g, kNat));
        CHECK(regime_classify(rm).label == RegimeLabel::quantum_mechanics);
    }
}

TEST_CASE("quadrants from simulated fixtures")
{
    const double hot = std::sqrt(2e4);
    const double dt = 1e-3;
    const auto rec = integrate_hamilton(HarmonicPotential{1.0, 1.0}, 0.0, hot,
                                        {dt, static_cast<std::size_t>(4.0 * kPi / dt)}, kNat);
    CHECK(regime_classify(regime_metrics(info_ledger(rec, kNat))).label ==
          RegimeLabel::classical_mechanics_or_adiabatic_eq);

    PistonConfig slow;
    slow.wall_speed = 3e-3;
    slow.L_end = 2.0;
    CHECK(regime_classify(regime_metrics(info_ledger(piston_simulate(slow, kNat), kNat))).label ==
          RegimeLabel::nonadiabatic_equilibrium_td);

    PistonConfig fast = slow;
    fast.wall_speed = 0.3;
    CHECK(regime_classify(regime_metrics(info_ledger(piston_simulate(fast, kNat), kNat))).label ==
          RegimeLabel::nonadiabatic_nonequilibrium);
}

TEST_CASE("rate bounds in SI")
{
    const auto si = Constants::si();
    const auto rb = rate_bounds(1.0, 300.0, si);
    CHECK(rb.bound_h == Approx(2.736e34).epsilon(1e-3));
    CHECK(std::abs(rb.bound_f - rb.bound_h) <= 1e-12 * rb.bound_h);
    CHECK(rb.per_interval_cap == Approx(0.7213).epsilon(1e-4));
    CHECK(rb.bremermann < rb.bound_h);
    CHECK(rb.bound_h < rb.bekenstein);
    CHECK(rb.pendry_ratio == Approx(std::sqrt(kPi / 3.0)).epsilon(1e-12));
    CHECK(rb.continuous_bound == Approx(rb.continuous_bound_hbar).epsilon(1e-12));

    auto doubled = si;
    doubled.f *= 2.0;
    const auto rd = rate_bounds(1.0, 300.0, doubled);
    CHECK(rd.bound_f == Approx(rb.bound_f / 2.0).epsilon(1e-14));
    CHECK(rd.bound_h == rb.bound_h);
}

TEST_CASE("rate bound ordering and cap for any energy")
{
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> expo(-30.0, 30.0);
    for (int k = 0; k < 200; ++k) {
        const auto rb = rate_bounds(std::pow(10.0, expo(rng)), 1.0, kNat);
        CHECK(rb.bremermann < rb.bound_h);
        CHECK(rb.bound_h < rb.bekenstein);
        CHECK(rb.per_interval_cap == 1.0 / (2.0 * std::log(2.0)));
    }
    CHECK_THROWS_AS(rate_bounds(0.0, 1.0, kNat), PreconditionError);
    CHECK_THROWS_AS(rate_bounds(1.0, -1.0, kNat), PreconditionError);
}
