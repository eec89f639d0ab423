#include "cpdq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cpdq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Compensated accumulator; keeps round-off of long step sequences at O(eps).
struct Compensated {
    double sum;
    double carry = 0.0;

    void add(double x)
    {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    void set(double x)
    {
        sum = x;
        carry = 0.0;
    }
};

// Free flight inside [0, L] for a time dt, reflecting at the walls at the exact hit time.
void well_flight(Compensated& q, Compensated& p, double dt, double mass, double L)
{
    double remaining = dt;
    for (int bounces = 0; remaining > 0.0; ++bounces) {
        const double v = p.sum / mass;
        if (v == 0.0) {
            return;
        }
        const double wall = v > 0.0 ? L : 0.0;
        const double t_hit = (wall - q.sum) / v;
        if (t_hit >= remaining) {
            q.add(v * remaining);
            return;
        }
        q.set(wall);
        p.set(-p.sum);
        remaining -= std::max(t_hit, 0.0);
        if (bounces > 1000000) {
            throw ComputationError("infinite well: too many reflections in one step");
        }
    }
}

}  // namespace

TrajectoryRecord TrajectoryRecord::from_trajectory(Trajectory traj)
{
    const std::size_t n = traj.size();
    const double m = traj.constants().mass;
    TrajectoryRecord rec{std::move(traj), {}, {}, {}, {}, {}, {}};
    rec.energy_T.resize(n);
    rec.energy_V.resize(n);
    rec.energy_E.resize(n);
    rec.delta_q_series.assign(n, kNaN);
    rec.f_series.assign(n, kNaN);
    rec.gap_mask.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = rec.traj.samples()[i];
        rec.energy_T[i] = s.p * s.p / (2.0 * m);
        rec.energy_V[i] = eval_potential(rec.traj.potential(), s.q).V;
        rec.energy_E[i] = rec.energy_T[i] + rec.energy_V[i];
        rec.gap_mask[i] = s.gap();
        if (!s.gap()) {
            rec.delta_q_series[i] = *s.delta_q;
            rec.f_series[i] = std::abs(s.p) * *s.delta_q;
        }
    }
    return rec;
}

TrajectoryRecord integrate_hamilton(const Potential& pot, double q0, double p0, const IntegratorConfig& cfg,
                                    const Constants& consts)
{
    if (!(cfg.dt > 0.0) || cfg.n_steps < 4) {
        throw PreconditionError("integrator: need dt > 0 and n_steps >= 4");
    }
    if (!in_domain(pot, q0) || !std::isfinite(p0)) {
        throw DomainError("integrator: initial state outside the potential's domain");
    }
    const double m = consts.mass;
    const double dt = cfg.dt;
    const auto* well = std::get_if<InfiniteWell>(&pot);

    std::vector<DofState> samples;
    samples.reserve(cfg.n_steps + 1);
    samples.push_back(DofState::make(0.0, q0, p0, consts));

    Compensated q{q0};
    Compensated p{p0};
    double force = well ? 0.0 : -eval_potential(pot, q0).dV;
    for (std::size_t i = 1; i <= cfg.n_steps; ++i) {
        if (well) {
            well_flight(q, p, dt, m, well->L);
        } else {
            p.add(0.5 * dt * force);
            q.add(dt * p.sum / m);
            if (!in_domain(pot, q.sum)) {
                std::ostringstream msg;
                msg << "integrator: step " << i << " left the domain";
                throw IntegrationError(msg.str(), i - 1);
            }
            force = -eval_potential(pot, q.sum).dV;
            p.add(0.5 * dt * force);
        }
        if (!std::isfinite(q.sum) || !std::isfinite(p.sum)) {
            std::ostringstream msg;
            msg << "integrator: non-finite state at step " << i;
            throw IntegrationError(msg.str(), i - 1);
        }
        samples.push_back(DofState::make(static_cast<double>(i) * dt, q.sum, p.sum, consts));
    }
    return TrajectoryRecord::from_trajectory(Trajectory(std::move(samples), dt, pot, consts));
}

CpdqDiagnostics cpdq_diagnostics(const TrajectoryRecord& rec, const Constants& consts)
{
    CpdqDiagnostics out{0.0, rec.f_series, 0};
    std::size_t used = 0;
    for (std::size_t i = 0; i < rec.f_series.size(); ++i) {
        if (rec.gap_mask[i]) {
            ++out.masked;
            continue;
        }
        ++used;
        out.max_rel_drift = std::max(out.max_rel_drift, std::abs(rec.f_series[i] - consts.f) / consts.f);
    }
    if (used == 0) {
        throw ComputationError("cpdq_diagnostics: every sample is masked");
    }
    return out;
}

numerics::MaskedSeries newton_uncertainty_residual(const TrajectoryRecord& rec)
{
    const std::size_t n = rec.traj.size();
    const double m = rec.traj.constants().mass;
    const auto& s = rec.traj.samples();

    std::size_t run = 0;
    std::size_t longest = 0;
    for (std::size_t i = 0; i < n; ++i) {
        run = rec.gap_mask[i] ? 0 : run + 1;
        longest = std::max(longest, run);
    }
    if (longest < 5) {
        throw ComputationError("newton_uncertainty_residual: no unmasked span of 5 samples");
    }

    std::vector<bool> defined(n);
    for (std::size_t i = 0; i < n; ++i) {
        defined[i] = !rec.gap_mask[i];
    }
    const auto pdot = numerics::derivative2_masked(rec.traj.momenta(), defined, rec.traj.dt());

    numerics::MaskedSeries out{std::vector<double>(n, kNaN), std::vector<bool>(n, false)};
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!defined[i - 1] || !defined[i] || !defined[i + 1] || !pdot.valid[i]) {
            continue;
        }
        const double dq = s[i + 1].q - s[i - 1].q;
        if (dq == 0.0) {
            continue;
        }
        const double dln = std::log(rec.delta_q_series[i + 1]) - std::log(rec.delta_q_series[i - 1]);
        const double qdot = s[i].p / m;
        out.values[i] = pdot.values[i] + s[i].p * qdot * (dln / dq);
        out.valid[i] = true;
    }
    return out;
}

EnergyBudget energy_budget(const TrajectoryRecord& rec)
{
    const std::size_t n = rec.energy_E.size();
    EnergyBudget out{std::vector<double>(n - 1), 0.0};
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dT = rec.energy_T[i + 1] - rec.energy_T[i];
        const double dV = rec.energy_V[i + 1] - rec.energy_V[i];
        out.work_energy_residual[i] = dT + dV;
    }
    const double E0 = rec.energy_E.front();
    double drift = 0.0;
    for (double E : rec.energy_E) {
        drift = std::max(drift, std::abs(E - E0));
    }
    out.max_E_drift = E0 != 0.0 ? drift / std::abs(E0) : drift;
    return out;
}

}  // namespace cpdq
