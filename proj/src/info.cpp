#include "cpdq/info.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cpdq {

namespace {

constexpr double kLn2 = std::numbers::ln2;

void close_ledger(InfoLedger& led)
{
    double acc = 0.0;
    led.I_cumulative.clear();
    for (std::size_t i = 0; i < led.dI_q.size(); ++i) {
        acc += led.dI_q[i] + led.dI_p[i];
        led.I_cumulative.push_back(acc);
    }
}

}  // namespace

InfoLedger info_ledger(const TrajectoryRecord& rec, const Constants& consts)
{
    const auto& s = rec.traj.samples();
    const std::size_t n = s.size();
    const auto mask = turning_point_mask(rec.traj, kTurningMargin);
    const double m = consts.mass;
    InfoLedger led;
    std::size_t used = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dt = s[i + 1].t - s[i].t;
        led.dt.push_back(dt);
        if (mask[i] || mask[i + 1]) {
            led.dI_q.push_back(0.0);
            led.dI_p.push_back(0.0);
            led.valid.push_back(false);
            led.tau.push_back(0.0);
            continue;
        }
        const double ktheta = 0.5 * (s[i].p * s[i].p + s[i + 1].p * s[i + 1].p) / m;
        const double dW = -(rec.energy_V[i + 1] - rec.energy_V[i]);
        const double dT = rec.energy_T[i + 1] - rec.energy_T[i];
        led.dI_q.push_back(dW / (ktheta * kLn2));
        led.dI_p.push_back(-dT / (ktheta * kLn2));
        led.valid.push_back(true);
        led.tau.push_back(consts.f / ktheta);
        ++used;
    }
    if (used == 0) {
        throw ComputationError("info_ledger: every step is masked");
    }
    close_ledger(led);
    return led;
}

InfoLedger info_ledger(const PistonRecord& rec, const Constants& consts)
{
    const std::size_t n = rec.points();
    if (n < 2) {
        throw ComputationError("info_ledger: piston record has fewer than 2 points");
    }
    InfoLedger led;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double ktheta = 0.5 * consts.k_boltz * (rec.theta[i] + rec.theta[i + 1]);
        // k theta = 2E along the change, so the integral of dE / k theta is d ln p.
        led.dI_q.push_back(-std::log(rec.L[i + 1] / rec.L[i]) / kLn2);
        led.dI_p.push_back(-std::log(rec.p[i + 1] / rec.p[i]) / kLn2);
        led.valid.push_back(true);
        led.dt.push_back(rec.t[i + 1] - rec.t[i]);
        const double f_mid = 0.5 * (rec.f[i] + rec.f[i + 1]);
        led.tau.push_back(f_mid / ktheta);
    }
    close_ledger(led);
    return led;
}

std::string regime_label_name(RegimeLabel label)
{
    switch (label) {
    case RegimeLabel::classical_mechanics_or_adiabatic_eq:
        return "classical_mechanics_or_adiabatic_eq";
    case RegimeLabel::quantum_mechanics:
        return "quantum_mechanics";
    case RegimeLabel::nonadiabatic_equilibrium_td:
        return "nonadiabatic_equilibrium_td";
    case RegimeLabel::nonadiabatic_nonequilibrium:
        return "nonadiabatic_nonequilibrium";
    }
    return "unknown";
}

RegimeMetrics regime_metrics(const InfoLedger& ledger)
{
    RegimeMetrics rm{0.0, 0.0, 0.0};
    std::size_t used = 0;
    for (std::size_t i = 0; i < ledger.dI_q.size(); ++i) {
        if (!ledger.valid[i]) {
            continue;
        }
        rm.mean_abs_dI += std::abs(ledger.dI_q[i] + ledger.dI_p[i]);
        const double s = ledger.dt[i] > 0.0 ? ledger.tau[i] / ledger.dt[i] : 1.0;
        rm.max_step_dI_q = std::max(rm.max_step_dI_q, std::abs(ledger.dI_q[i]) * s);
        rm.max_step_dI_p = std::max(rm.max_step_dI_p, std::abs(ledger.dI_p[i]) * s);
        ++used;
    }
    if (used == 0) {
        throw ComputationError("regime_metrics: ledger has no valid step");
    }
    rm.mean_abs_dI /= static_cast<double>(used);
    return rm;
}

RegimeMetrics regime_metrics(const WkbProfile& profile)
{
    double kmax = 0.0;
    for (std::size_t i = 0; i < profile.k_of_x.size(); ++i) {
        if (profile.allowed[i]) {
            kmax = std::max(kmax, profile.k_of_x[i]);
        }
    }
    double vmax = 0.0;
    for (std::size_t i = 0; i < profile.k_of_x.size(); ++i) {
        if (profile.allowed[i] && profile.k_of_x[i] >= kTurningMargin * kmax) {
            vmax = std::max(vmax, profile.validity_metric[i]);
        }
    }
    const double step = vmax / kLn2;
    return {0.0, step, step};
}

RegimeReport regime_classify(const RegimeMetrics& metrics, const RegimeThresholds& thresholds)
{
    const bool ok = metrics.mean_abs_dI >= 0.0 && metrics.max_step_dI_q >= 0.0 && metrics.max_step_dI_p >= 0.0;
    if (!ok) {
        throw PreconditionError("regime_classify: metrics must be non-negative");
    }
    const bool zero = metrics.mean_abs_dI <= thresholds.tol_zero;
    const bool small = metrics.max_step_dI_q <= thresholds.tol_small && metrics.max_step_dI_p <= thresholds.tol_small;
    RegimeLabel label;
    if (zero) {
        label = small ? RegimeLabel::classical_mechanics_or_adiabatic_eq : RegimeLabel::quantum_mechanics;
    } else {
        label = small ? RegimeLabel::nonadiabatic_equilibrium_td : RegimeLabel::nonadiabatic_nonequilibrium;
    }
    return {metrics, thresholds, label};
}

RateBounds rate_bounds(double E, double theta, const Constants& consts)
{
    if (!(E > 0.0) || !(theta > 0.0) || !(consts.f > 0.0)) {
        throw PreconditionError("rate_bounds: E, theta and f must be positive");
    }
    const double h = consts.planck_h();
    const double kt = consts.k_boltz * theta;
    RateBounds rb{};
    rb.bound_f = E / (consts.f * kLn2);
    rb.bound_h = 4.0 * kPi * E / (h * kLn2);
    rb.bremermann = std::log(1.0 + 4.0 * kPi) * E / h;
    rb.bekenstein = 2.0 * kPi * kPi * E / (h * kLn2);
    rb.energy_rate_cap = kt * kt / (2.0 * consts.f);
    rb.per_interval_cap = 1.0 / (2.0 * kLn2);
    rb.continuous_bound = std::sqrt(rb.energy_rate_cap / (2.0 * consts.f)) / kLn2;
    rb.continuous_bound_hbar = std::sqrt(rb.energy_rate_cap / consts.hbar) / kLn2;
    rb.pendry = std::sqrt(kPi * rb.energy_rate_cap / (3.0 * consts.hbar)) / kLn2;
    rb.pendry_ratio = rb.pendry / rb.continuous_bound_hbar;
    return rb;
}

}  // namespace cpdq
