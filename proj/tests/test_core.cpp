#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"

#include "cpdq/core.hpp"

using namespace cpdq;
using doctest::Approx;

TEST_CASE("natural constants")
{
    const auto c = Constants::natural();
    CHECK(c.hbar == 1.0);
    CHECK(c.mass == 1.0);
    CHECK(c.k_boltz == 1.0);
    CHECK(c.c == 1.0);
    CHECK(c.f == c.hbar / 2.0);
    CHECK(c.f_ref == c.hbar / 2.0);
    CHECK(c.p_floor == 1e-9);
    CHECK_NOTHROW(c.validate());
    CHECK(c.planck_h() == Approx(2.0 * kPi));
}

TEST_CASE("si constants")
{
    const auto c = Constants::si();
    CHECK(c.f == c.hbar / 2.0);
    CHECK(c.f_ref == c.f);
    CHECK(c.hbar == Approx(1.054571817e-34).epsilon(1e-12));
    CHECK(c.c == 299792458.0);
    CHECK_NOTHROW(c.validate());
    CHECK(Constants::for_units(UnitSystem::si).hbar == c.hbar);
    CHECK(Constants::for_units(UnitSystem::natural).hbar == 1.0);
}

TEST_CASE("constants validation rejects non-positive fields")
{
    auto base = Constants::natural();
    double Constants::*fields[] = {&Constants::f, &Constants::hbar, &Constants::k_boltz, &Constants::mass,
                                   &Constants::c, &Constants::f_ref};
    for (auto field : fields) {
        auto c = base;
        c.*field = 0.0;
        CHECK_THROWS_AS(c.validate(), PreconditionError);
        c.*field = -1.0;
        CHECK_THROWS_AS(c.validate(), PreconditionError);
        c.*field = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(c.validate(), PreconditionError);
    }
    base.p_floor = -1.0;
    CHECK_THROWS_AS(base.validate(), PreconditionError);
}

TEST_CASE("eval_potential examples")
{
    SUBCASE("harmonic minimum")
    {
        const auto v = eval_potential(HarmonicPotential{1.0, 1.0}, 0.0);
        CHECK(v.V == 0.0);
        CHECK(v.dV == 0.0);
        CHECK(v.d2V == 1.0);
    }
    SUBCASE("linear, V = -F0 q")
    {
        const auto v = eval_potential(LinearPotential{2.0}, 3.0);
        CHECK(v.V == -6.0);
        CHECK(v.dV == -2.0);
        CHECK(v.d2V == 0.0);
    }
    SUBCASE("harmonic omega 2")
    {
        const auto v = eval_potential(HarmonicPotential{1.0, 2.0}, 1.0);
        CHECK(v.V == Approx(2.0));
        CHECK(v.dV == Approx(4.0));
        CHECK(v.d2V == Approx(4.0));
    }
    SUBCASE("free")
    {
        const auto v = eval_potential(FreePotential{}, 123.0);
        CHECK(v.V == 0.0);
        CHECK(v.dV == 0.0);
    }
    SUBCASE("soft well bottom")
    {
        const auto v = eval_potential(SoftWell{5.0, 2.0}, 0.0);
        CHECK(v.V == Approx(-5.0));
        CHECK(v.dV == Approx(0.0));
        CHECK(v.d2V == Approx(2.0 * 5.0 / 4.0));
    }
}

TEST_CASE("infinite well is a domain restriction")
{
    const Potential well = InfiniteWell{1.0};
    CHECK(in_domain(well, 0.0));
    CHECK(in_domain(well, 1.0));
    CHECK_FALSE(in_domain(well, -1e-12));
    CHECK_FALSE(in_domain(well, 1.5));
    const auto v = eval_potential(well, 0.5);
    CHECK(std::isfinite(v.V));
    CHECK(v.V == 0.0);
    CHECK_THROWS_AS(eval_potential(well, 2.0), DomainError);
    CHECK_THROWS_AS(eval_potential(HarmonicPotential{1.0, 1.0}, std::nan("")), DomainError);
    CHECK(potential_name(well) == "infinite_well");
}

TEST_CASE("potential derivative consistency at random points")
{
    std::mt19937 rng(20240917);
    std::uniform_real_distribution<double> pick(-4.0, 4.0);
    const Potential pots[] = {FreePotential{}, LinearPotential{1.7}, HarmonicPotential{1.3, 0.8},
                              SoftWell{3.0, 0.7}};
    const double h = 1e-4;
    for (const auto& pot : pots) {
        for (int k = 0; k < 100; ++k) {
            const double q = pick(rng);
            const auto v = eval_potential(pot, q);
            const double dV = (eval_potential(pot, q + h).V - eval_potential(pot, q - h).V) / (2.0 * h);
            const double d2V = (eval_potential(pot, q + h).dV - eval_potential(pot, q - h).dV) / (2.0 * h);
            CAPTURE(potential_name(pot));
            CAPTURE(q);
            CHECK(std::abs(v.dV - dV) <= 100.0 * h * h);
            CHECK(std::abs(v.d2V - d2V) <= 100.0 * h * h);
        }
    }
    std::uniform_real_distribution<double> inside(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const auto v = eval_potential(InfiniteWell{1.0}, inside(rng));
        CHECK(v.dV == 0.0);
    }
}

TEST_CASE("potential_min")
{
    CHECK(potential_min(HarmonicPotential{1.0, 1.0}, -2.0, 3.0) == 0.0);
    CHECK(potential_min(HarmonicPotential{1.0, 1.0}, 1.0, 3.0) == Approx(0.5));
    CHECK(potential_min(LinearPotential{1.0}, -5.0, 10.0) == Approx(-10.0));
    CHECK(potential_min(SoftWell{5.0, 1.0}, -10.0, 10.0) == Approx(-5.0));
}

TEST_CASE("compton_floor")
{
    SUBCASE("electron in SI")
    {
        const auto si = Constants::si();
        CHECK(compton_floor(9.109e-31, si) == Approx(1.931e-13).epsilon(1e-3));
    }
    SUBCASE("natural units")
    {
        CHECK(compton_floor(1.0, Constants::natural()) == Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("heavy limit")
    {
        const auto nat = Constants::natural();
        CHECK(compton_floor(1e6, nat) < compton_floor(1.0, nat));
        CHECK(compton_floor(std::numeric_limits<double>::infinity(), nat) == 0.0);
    }
    CHECK_THROWS_AS(compton_floor(0.0, Constants::natural()), PreconditionError);
}

TEST_CASE("DofState carries p delta_q = f")
{
    const auto c = Constants::natural();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> mag(-8.0, 8.0);
    for (int k = 0; k < 1000; ++k) {
        const double p = (k % 2 ? 1.0 : -1.0) * std::pow(10.0, mag(rng));
        const auto s = DofState::make(0.0, 0.0, p, c);
        REQUIRE_FALSE(s.gap());
        CHECK(std::abs(std::abs(p) * *s.delta_q - c.f) <= 1e-12 * c.f);
    }
    CHECK(DofState::make(0.0, 0.0, 0.0, c).gap());
    CHECK(DofState::make(0.0, 0.0, 1e-9, c).gap());
    CHECK_FALSE(DofState::make(0.0, 0.0, 2e-9, c).gap());
}
