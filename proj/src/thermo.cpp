#include "cpdq/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cpdq/numerics.hpp"

namespace cpdq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_record_point(PistonEventKind k)
{
    return k != PistonEventKind::fixed_wall;
}

void push_point(PistonRecord& rec, const PistonEvent& e, const Constants& consts)
{
    const double p = rec.cfg.mass * e.speed;
    const double f = p * e.L;
    rec.t.push_back(e.t);
    rec.L.push_back(e.L);
    rec.p.push_back(p);
    rec.f.push_back(f);
    rec.S.push_back(consts.k_boltz * std::log(f / consts.f_ref));
    rec.theta.push_back(p * e.speed / consts.k_boltz);
    rec.P.push_back(p * e.speed / e.L);
}

bool reached(const PistonConfig& cfg, double L)
{
    if (!cfg.L_end) {
        return false;
    }
    return cfg.wall_speed >= 0.0 ? L >= *cfg.L_end : L <= *cfg.L_end;
}

}  // namespace

void PistonConfig::validate() const
{
    if (!(L0 > 0.0) || !(v0 > 0.0) || !(mass > 0.0)) {
        throw PreconditionError("piston: L0, v0 and mass must be positive");
    }
    if (mode == PistonMode::sudden_jump) {
        if (!L_end || !(*L_end > 0.0)) {
            throw PreconditionError("piston: sudden_jump needs a positive L_end");
        }
        return;
    }
    if (!(std::abs(wall_speed) < v0)) {
        throw PreconditionError("piston: |wall_speed| must be below v0");
    }
    if (!t_end && !L_end) {
        throw PreconditionError("piston: need t_end or L_end");
    }
    if (!t_end && L_end) {
        const bool reachable = (wall_speed > 0.0 && *L_end > L0) || (wall_speed < 0.0 && *L_end < L0 && *L_end > 0.0);
        if (!reachable) {
            throw PreconditionError("piston: L_end cannot be reached with this wall speed");
        }
    }
}

PistonRecord piston_simulate(const PistonConfig& cfg, const Constants& consts)
{
    cfg.validate();
    PistonRecord rec;
    rec.cfg = cfg;

    const double u = cfg.mode == PistonMode::sudden_jump ? 0.0 : cfg.wall_speed;
    double L_base = cfg.L0;  // wall position at t = 0 (after the jump, if any)
    double t = 0.0;
    double x = cfg.L0;
    double v = -cfg.v0;  // signed particle velocity

    auto emit = [&](PistonEventKind kind, double L) {
        PistonEvent e{kind, t, L, std::abs(v)};
        rec.events.push_back(e);
        if (is_record_point(kind)) {
            push_point(rec, e, consts);
        }
    };

    emit(PistonEventKind::start, cfg.L0);
    std::size_t moving_hits_after_jump = 0;
    if (cfg.mode == PistonMode::sudden_jump) {
        L_base = *cfg.L_end;
        emit(PistonEventKind::jump, L_base);
    }

    for (std::size_t n = 0; n < cfg.max_collisions; ++n) {
        const double L_now = L_base + u * t;
        double dt_hit = 0.0;
        bool moving = false;
        if (v < 0.0) {
            dt_hit = x / -v;
        } else {
            if (!(v > std::abs(u))) {
                std::ostringstream msg;
                msg << "piston: particle speed " << v << " cannot reach a wall moving at " << u << " (t = " << t << ")";
                throw ModelViolationError(msg.str());
            }
            dt_hit = (L_now - x) / (v - u);
            moving = true;
        }
        const double t_next = t + dt_hit;
        if (cfg.t_end && t_next > *cfg.t_end) {
            break;
        }
        t = t_next;
        if (moving) {
            x = L_base + u * t;
            v = 2.0 * u - v;
            if (v == 0.0) {
                throw ModelViolationError("piston: particle brought to rest by the moving wall");
            }
            emit(PistonEventKind::moving_wall, x);
            if (cfg.mode == PistonMode::sudden_jump) {
                if (!cfg.t_end && ++moving_hits_after_jump >= cfg.settle_bounces) {
                    break;
                }
            } else if (reached(cfg, x)) {
                break;
            }
            if (v > 0.0) {
                std::ostringstream msg;
                msg << "piston: particle left a wall moving at " << u << " without turning back (t = " << t << ")";
                throw ModelViolationError(msg.str());
            }
        } else {
            x = 0.0;
            v = -v;
            emit(PistonEventKind::fixed_wall, L_base + u * t);
        }
    }
    return rec;
}

HeatTheoremResidual heat_theorem_residual(const PistonRecord& rec, const Constants&)
{
    const std::size_t n = rec.points();
    if (n < 2) {
        throw PreconditionError("heat_theorem_residual: at least 2 record points required");
    }
    const double m = rec.cfg.mass;
    HeatTheoremResidual out;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dE = (rec.p[i + 1] * rec.p[i + 1] - rec.p[i] * rec.p[i]) / (2.0 * m);
        const double dS = rec.S[i + 1] - rec.S[i];
        const double dVol = rec.L[i + 1] - rec.L[i];
        const double theta = 0.5 * (rec.theta[i] + rec.theta[i + 1]);
        const double P = 0.5 * (rec.P[i] + rec.P[i + 1]);
        out.dE.push_back(dE);
        out.residual.push_back(dE - theta * dS + P * dVol);
        out.log_residual.push_back(std::log(rec.f[i + 1] / rec.f[i]) - std::log(rec.p[i + 1] / rec.p[i]) -
                                   std::log(rec.L[i + 1] / rec.L[i]));
    }
    return out;
}

ThermoSeries extended_quantities(const PistonRecord& rec, const Constants& consts)
{
    const std::size_t n = rec.points();
    if (n < 3) {
        throw PreconditionError("extended_quantities: at least 3 record points required");
    }
    const double m = rec.cfg.mass;
    const double k = consts.k_boltz;
    ThermoSeries ts;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dt = rec.t[i + 1] - rec.t[i];
        const double dp = rec.p[i + 1] - rec.p[i];
        const double dL = rec.L[i + 1] - rec.L[i];
        const double p_mid = 0.5 * (rec.p[i] + rec.p[i + 1]);
        const double L_mid = 0.5 * (rec.L[i] + rec.L[i + 1]);
        const double dS = rec.S[i + 1] - rec.S[i];

        ts.dt.push_back(dt);
        ts.dE.push_back((rec.p[i + 1] * rec.p[i + 1] - rec.p[i] * rec.p[i]) / (2.0 * m));
        ts.dS.push_back(dS);
        ts.dVol.push_back(dL);
        ts.theta.push_back(0.5 * (rec.theta[i] + rec.theta[i + 1]));
        ts.P.push_back(0.5 * (rec.P[i] + rec.P[i + 1]));

        // pdot delta_q + p delta_qdot with interval averages, times the interval length.
        const double dA = dp * L_mid + p_mid * dL;
        ts.dA_ext.push_back(dA);
        ts.dH_ext.push_back(L_mid * dp + p_mid * L_mid * std::log(rec.L[i + 1] / rec.L[i]));
        ts.df.push_back(rec.f[i + 1] - rec.f[i]);
        // Simpson in S, with f(S) = f_ref exp(S / k) at the midpoint.
        const double f_mid = consts.f_ref * std::exp(0.5 * (rec.S[i] + rec.S[i + 1]) / k);
        const double fdS = dS / (6.0 * k) * (rec.f[i] + 4.0 * f_mid + rec.f[i + 1]);
        ts.f_dS_over_k.push_back(fdS);

        if (dt > 0.0) {
            ts.L_ext_rate.push_back(dA / dt);
            ts.f_rate.push_back(ts.df.back() / dt);
            ts.fS_rate.push_back(fdS / dt);
        } else {
            ts.L_ext_rate.push_back(kNaN);
            ts.f_rate.push_back(kNaN);
            ts.fS_rate.push_back(kNaN);
        }
        ts.err_entropy.push_back(numerics::rel_diff(dA, fdS));
        ts.err_fdot.push_back(numerics::rel_diff(dA, ts.df.back()));

        // Simpson for the integral of dA / f with f linear along the interval.
        const double f_lin_mid = 0.5 * (rec.f[i] + rec.f[i + 1]);
        ts.action_over_f += dA / 6.0 * (1.0 / rec.f[i] + 4.0 / f_lin_mid + 1.0 / rec.f[i + 1]);
    }
    ts.entropy_over_k = (rec.S.back() - rec.S.front()) / k;
    return ts;
}

double delta_ln_pL_at(const PistonRecord& rec, double L_target)
{
    const std::size_t n = rec.points();
    if (n < 2) {
        throw PreconditionError("delta_ln_pL_at: at least 2 record points required");
    }
    const double ln0 = std::log(rec.f.front());
    const double target = std::log(L_target);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = std::log(rec.L[i]);
        const double b = std::log(rec.L[i + 1]);
        const bool inside = (a <= target && target <= b) || (b <= target && target <= a);
        if (inside && a != b) {
            const double w = (target - a) / (b - a);
            const double lnf = (1.0 - w) * std::log(rec.f[i]) + w * std::log(rec.f[i + 1]);
            return lnf - ln0;
        }
    }
    return std::log(rec.f.back()) - ln0;
}

AdiabaticScan adiabatic_scan(const std::vector<double>& ratios, const PistonConfig& tmpl, const Constants& consts,
                             double threshold)
{
    AdiabaticScan scan;
    const double L_target = tmpl.L_end.value_or(2.0 * tmpl.L0);
    for (double r : ratios) {
        if (!(r >= 0.0 && r < 1.0)) {
            throw PreconditionError("adiabatic_scan: ratios must lie in [0, 1)");
        }
        PistonConfig cfg = tmpl;
        cfg.mode = PistonMode::constant_speed;
        cfg.wall_speed = r * tmpl.v0;
        cfg.L_end = L_target;
        cfg.t_end.reset();
        if (r == 0.0) {
            cfg.t_end = 10.0 * tmpl.L0 / tmpl.v0;
        }
        const auto rec = piston_simulate(cfg, consts);
        const double d = delta_ln_pL_at(rec, L_target);
        scan.rows.push_back({r, std::abs(d), d});
    }
    auto sorted = scan.rows;
    std::sort(sorted.begin(), sorted.end(), [](const ScanRow& a, const ScanRow& b) { return a.ratio < b.ratio; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].delta_ln_pL + 1e-12 < sorted[i - 1].delta_ln_pL) {
            scan.monotone = false;
        }
    }
    for (const auto& row : sorted) {
        if (row.delta_ln_pL < threshold) {
            scan.largest_ratio_below = row.ratio;
        }
    }
    return scan;
}

}  // namespace cpdq
