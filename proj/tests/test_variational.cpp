#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

#include "cpdq/core.hpp"
#include "cpdq/variational.hpp"

using namespace cpdq;
using doctest::Approx;

namespace {

const Constants kNat = Constants::natural();

// q = A cos(w t), p = -m A w sin(w t).
Trajectory harmonic_exact(double t0, double dt, std::size_t n, double A = 1.0, double w = 1.0)
{
    return Trajectory::sample([=](double t) { return A * std::cos(w * t); },
                              [=](double t) { return -A * w * std::sin(w * t); }, t0, dt, n,
                              HarmonicPotential{1.0, w}, kNat);
}

double max_valid_abs(const numerics::MaskedSeries& s)
{
    return s.max_abs();
}

}  // namespace

TEST_CASE("lagrangian_eval examples")
{
    auto a = lagrangian_eval(7.0, 2.0, FreePotential{}, 1.0);
    CHECK(a.L == 2.0);
    CHECK(a.p == 2.0);
    auto b = lagrangian_eval(1.0, 0.0, HarmonicPotential{1.0, 1.0}, 1.0);
    CHECK(b.L == -0.5);
    CHECK(b.p == 0.0);
    auto c = lagrangian_eval(1.0, 3.0, HarmonicPotential{1.0, 2.0}, 1.0);
    CHECK(c.L == Approx(2.5));
    CHECK(c.p == 3.0);
    CHECK_THROWS_AS(lagrangian_eval(2.0, 0.0, InfiniteWell{1.0}, 1.0), DomainError);
}

TEST_CASE("trajectory validation")
{
    std::vector<DofState> few;
    for (int i = 0; i < 4; ++i) {
        few.push_back(DofState::make(i * 0.1, 0.0, 1.0, kNat));
    }
    CHECK_THROWS_AS(Trajectory(few, 0.1, FreePotential{}, kNat), PreconditionError);
    few.push_back(DofState::make(0.45, 0.0, 1.0, kNat));
    CHECK_THROWS_AS(Trajectory(few, 0.1, FreePotential{}, kNat), PreconditionError);
    few.back().t = 0.4;
    CHECK_NOTHROW(Trajectory(few, 0.1, FreePotential{}, kNat));
    CHECK_THROWS_AS(Trajectory(few, -0.1, FreePotential{}, kNat), PreconditionError);
}

TEST_CASE("special variation of a free particle")
{
    const auto traj = Trajectory::sample([](double t) { return 2.0 * t; }, [](double) { return 2.0; }, 0.0, 0.01, 50,
                                         FreePotential{}, kNat);
    const auto var = special_variation(traj, 1e-6);
    CHECK(var.source == VariationSource::special);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        CHECK(var.delta_q[i] == 5e-7);
        CHECK(std::abs(var.delta_qdot[i]) <= 1e-14 * 5e-7 / traj.dt());
        CHECK_FALSE(var.gap_mask[i]);
    }
    const auto dL = first_order_dL(traj, var);
    CHECK(dL.valid_count() == traj.size());
    CHECK(max_valid_abs(dL) <= 1e-12 * 1e-6);
}

TEST_CASE("special variation follows epsilon / p away from turning points")
{
    const double eps = default_epsilon(kNat);
    CHECK(eps == Approx(5e-7));
    const auto traj = harmonic_exact(0.5, 1e-3, 2100);
    const auto var = special_variation(traj, eps);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.samples()[i].t;
        CHECK(var.delta_q[i] == Approx(eps / (-std::sin(t))).epsilon(1e-13));
        CHECK(traj.samples()[i].p * var.delta_q[i] == Approx(eps).epsilon(1e-14));
    }
}

TEST_CASE("gap mask flags exactly |p| <= p_floor")
{
    const auto traj = harmonic_exact(0.0, 1e-3, 7000);
    const auto var = special_variation(traj, default_epsilon(kNat));
    std::size_t gaps = 0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const bool expect = std::abs(traj.samples()[i].p) <= kNat.p_floor;
        CHECK(var.gap_mask[i] == expect);
        if (expect) {
            ++gaps;
            CHECK(std::isnan(var.delta_q[i]));
            CHECK_FALSE(var.qdot_valid[i]);
        }
    }
    CHECK(gaps >= 1);
    CHECK(var.gap_mask[0]);
    CHECK(var.gap_mask[3142] == (std::abs(traj.samples()[3142].p) <= kNat.p_floor));
}

TEST_CASE("turning_point_mask")
{
    const auto traj = harmonic_exact(0.0, 1e-3, 7000);
    const auto bare = turning_point_mask(traj, 0.0);
    const auto wide = turning_point_mask(traj, kTurningMargin);
    double pmax = 0.0;
    for (const auto& s : traj.samples()) {
        pmax = std::max(pmax, std::abs(s.p));
    }
    std::size_t nb = 0, nw = 0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        nb += bare[i];
        nw += wide[i];
        if (bare[i]) {
            CHECK(wide[i]);
        }
        CHECK(wide[i] == (std::abs(traj.samples()[i].p) <= kTurningMargin * pmax));
    }
    CHECK(nw > nb);
}

TEST_CASE("first-order dL under the special variation")
{
    const double eps = default_epsilon(kNat);
    const auto traj = harmonic_exact(0.5, 1e-3, 2100);
    const auto var = special_variation(traj, eps);

    SUBCASE("actual trajectory: O(dt^2)")
    {
        const auto dL = first_order_dL(traj, var);
        CHECK(dL.valid_count() == traj.size());
        CHECK(max_valid_abs(dL) <= 1e-4 * eps);
    }
    SUBCASE("perturbed path is far from zero")
    {
        const auto bad = perturb(traj, 0.01, 3.0);
        const auto dL = first_order_dL(bad, special_variation(bad, eps));
        CHECK(max_valid_abs(dL) >= 1e-2 * eps);
        CHECK(max_valid_abs(dL) > 100.0 * max_valid_abs(first_order_dL(traj, var)));
    }
    SUBCASE("misaligned variation")
    {
        auto short_var = var;
        short_var.delta_q.pop_back();
        CHECK_THROWS_AS(first_order_dL(traj, short_var), PreconditionError);
    }
}

TEST_CASE("dL is bounded by epsilon times the Lagrange residual")
{
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> amp(1e-4, 3e-2);
    std::uniform_real_distribution<double> freq(0.5, 4.0);
    const double eps = default_epsilon(kNat);
    const auto base = harmonic_exact(0.6, 1e-3, 1900);
    for (int k = 0; k < 20; ++k) {
        const auto traj = perturb(base, amp(rng), freq(rng));
        const auto r = lagrange_residual(traj);
        double rmax = 0.0, pmin = 1e300;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            rmax = std::max(rmax, std::abs(r[i]));
            pmin = std::min(pmin, std::abs(traj.samples()[i].p));
        }
        const auto dL = first_order_dL(traj, special_variation(traj, eps));
        CHECK(max_valid_abs(dL) <= 2.0 * eps * rmax / pmin);
    }
}

TEST_CASE("lagrange_residual")
{
    SUBCASE("q = cos t")
    {
        const auto r = lagrange_residual(harmonic_exact(0.0, 1e-3, 6284));
        const double m = *std::max_element(r.begin(), r.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
        CHECK(std::abs(m) <= 1e-6);
    }
    SUBCASE("uniform force")
    {
        const double F0 = 1.5;
        const auto traj = Trajectory::sample([=](double t) { return 0.5 * F0 * t * t; }, [=](double t) { return F0 * t; },
                                             0.0, 1e-2, 300, LinearPotential{F0}, kNat);
        for (double x : lagrange_residual(traj)) {
            CHECK(std::abs(x) <= 1e-10);
        }
    }
    SUBCASE("straight line in a harmonic well")
    {
        const auto traj = Trajectory::sample([](double t) { return t; }, [](double) { return 1.0; }, 0.0, 1e-2, 200,
                                             HarmonicPotential{1.0, 1.0}, kNat);
        const auto r = lagrange_residual(traj);
        for (std::size_t i = 0; i < traj.size(); ++i) {
            CHECK(r[i] == Approx(traj.samples()[i].q).epsilon(1e-9));
        }
    }
}

TEST_CASE("action variation on the actual trajectory")
{
    const double eps = default_epsilon(kNat);
    const auto traj = harmonic_exact(0.5, 1e-3, 2100);
    const auto var = special_variation(traj, eps);
    std::mt19937 rng(3);
    std::uniform_int_distribution<std::size_t> pick(0, traj.size() - 1);
    for (int k = 0; k < 50; ++k) {
        std::size_t i1 = pick(rng), i2 = pick(rng);
        if (i1 == i2) {
            continue;
        }
        if (i1 > i2) {
            std::swap(i1, i2);
        }
        const auto a = action_and_variation(traj, var, i1, i2);
        CHECK(std::abs(a.dA_boundary) <= 1e-15);
        CHECK(std::abs(a.dA_bulk) <= 1e-6 * eps);
        CHECK(std::abs(a.dA_direct - (a.dA_boundary + a.dA_bulk)) <= 1e-8 * (std::abs(a.A) + eps));
    }
}

TEST_CASE("Hamilton's principle with fixed ends")
{
    const auto traj = harmonic_exact(0.0, 1e-3, 3001);
    const double T = 3.0;
    std::vector<double> dq(traj.size());
    for (std::size_t i = 0; i < dq.size(); ++i) {
        dq[i] = 1e-6 * std::sin(kPi * traj.samples()[i].t / T) * std::sin(3.0 * traj.samples()[i].t);
    }
    dq.front() = 0.0;
    dq.back() = 0.0;
    const auto var = custom_variation(traj, dq);
    CHECK(var.source == VariationSource::custom);
    const auto a = action_and_variation(traj, var, 0, traj.size() - 1);
    CHECK(std::abs(a.dA_boundary) <= 1e-15);
    CHECK(std::abs(a.dA_direct) <= 1e-12);
    CHECK(std::abs(a.dA_direct - (a.dA_boundary + a.dA_bulk)) <= 1e-8 * (std::abs(a.A) + 1e-6));
    CHECK_THROWS_AS(custom_variation(traj, std::vector<double>(3, 0.0)), PreconditionError);
}

TEST_CASE("non-solution has a nonzero bulk term")
{
    const double eps = default_epsilon(kNat);
    const auto bad = perturb(harmonic_exact(0.5, 1e-3, 2100), 0.01, 3.0);
    const auto var = special_variation(bad, eps);
    const auto a = action_and_variation(bad, var, 0, bad.size() - 1);
    CHECK(std::abs(a.dA_bulk) >= 1e-3 * eps);
    CHECK(std::abs(a.dA_direct - (a.dA_boundary + a.dA_bulk)) <= 1e-8 * (std::abs(a.A) + eps));
}

TEST_CASE("action_and_variation preconditions")
{
    const auto traj = harmonic_exact(0.0, 1e-3, 500);
    const auto var = special_variation(traj, default_epsilon(kNat));
    CHECK_THROWS_AS(action_and_variation(traj, var, 0, 100), PreconditionError);  // p(0) = 0
    CHECK_NOTHROW(action_and_variation(traj, var, 10, 100));
    CHECK_THROWS_AS(action_and_variation(traj, var, 100, 10), PreconditionError);
    CHECK_THROWS_AS(action_and_variation(traj, var, 10, 500), PreconditionError);
}
