#include "cpdq/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cpdq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

Trajectory::Trajectory(std::vector<DofState> samples, double dt, Potential pot, Constants consts)
    : samples_(std::move(samples)), dt_(dt), pot_(std::move(pot)), consts_(consts)
{
    if (samples_.size() < 5) {
        throw PreconditionError("trajectory: at least 5 samples required");
    }
    if (!(dt_ > 0.0)) {
        throw PreconditionError("trajectory: dt must be positive");
    }
    for (std::size_t i = 1; i < samples_.size(); ++i) {
        const double step = samples_[i].t - samples_[i - 1].t;
        if (!(step > 0.0) || std::abs(step - dt_) > 1e-12 * dt_ * std::max(1.0, static_cast<double>(i))) {
            std::ostringstream msg;
            msg << "trajectory: non-uniform time step at sample " << i;
            throw PreconditionError(msg.str());
        }
    }
}

Trajectory Trajectory::sample(const std::function<double(double)>& q, const std::function<double(double)>& p,
                              double t0, double dt, std::size_t n, const Potential& pot, const Constants& consts)
{
    std::vector<DofState> s;
    s.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t0 + static_cast<double>(i) * dt;
        s.push_back(DofState::make(t, q(t), p(t), consts));
    }
    return Trajectory(std::move(s), dt, pot, consts);
}

std::vector<double> Trajectory::times() const
{
    std::vector<double> v(samples_.size());
    std::transform(samples_.begin(), samples_.end(), v.begin(), [](const DofState& s) { return s.t; });
    return v;
}

std::vector<double> Trajectory::positions() const
{
    std::vector<double> v(samples_.size());
    std::transform(samples_.begin(), samples_.end(), v.begin(), [](const DofState& s) { return s.q; });
    return v;
}

std::vector<double> Trajectory::momenta() const
{
    std::vector<double> v(samples_.size());
    std::transform(samples_.begin(), samples_.end(), v.begin(), [](const DofState& s) { return s.p; });
    return v;
}

Trajectory perturb(const Trajectory& traj, double amplitude, double omega)
{
    const double m = traj.constants().mass;
    std::vector<DofState> s;
    s.reserve(traj.size());
    for (const auto& x : traj.samples()) {
        const double q = x.q + amplitude * std::sin(omega * x.t);
        const double p = x.p + m * amplitude * omega * std::cos(omega * x.t);
        s.push_back(DofState::make(x.t, q, p, traj.constants()));
    }
    return Trajectory(std::move(s), traj.dt(), traj.potential(), traj.constants());
}

std::vector<bool> turning_point_mask(const Trajectory& traj, double margin)
{
    double pmax = 0.0;
    for (const auto& s : traj.samples()) {
        pmax = std::max(pmax, std::abs(s.p));
    }
    const double cut = std::max(traj.constants().p_floor, margin * pmax);
    std::vector<bool> mask(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        mask[i] = std::abs(traj.samples()[i].p) <= cut;
    }
    return mask;
}

LagrangianValue lagrangian_eval(double q, double qdot, const Potential& pot, double mass)
{
    const auto v = eval_potential(pot, q);
    return {0.5 * mass * qdot * qdot - v.V, mass * qdot};
}

VariationSeries special_variation(const Trajectory& traj, double epsilon)
{
    const std::size_t n = traj.size();
    VariationSeries var;
    var.epsilon = epsilon;
    var.source = VariationSource::special;
    var.delta_q.assign(n, kNaN);
    var.gap_mask.assign(n, false);
    std::vector<bool> defined(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = traj.samples()[i];
        var.gap_mask[i] = s.gap();
        defined[i] = !s.gap();
        if (defined[i]) {
            var.delta_q[i] = epsilon / s.p;
        }
    }
    auto d = numerics::derivative2_masked(var.delta_q, defined, traj.dt());
    var.delta_qdot = std::move(d.values);
    var.qdot_valid = std::move(d.valid);
    return var;
}

VariationSeries custom_variation(const Trajectory& traj, std::vector<double> delta_q)
{
    if (delta_q.size() != traj.size()) {
        throw PreconditionError("custom_variation: delta_q must be aligned with the trajectory");
    }
    VariationSeries var;
    var.source = VariationSource::custom;
    var.delta_q = std::move(delta_q);
    var.gap_mask.assign(traj.size(), false);
    var.delta_qdot = numerics::derivative2(var.delta_q, traj.dt());
    var.qdot_valid.assign(traj.size(), true);
    return var;
}

namespace {

void require_aligned(const Trajectory& traj, const VariationSeries& var)
{
    const std::size_t n = traj.size();
    if (var.delta_q.size() != n || var.delta_qdot.size() != n || var.gap_mask.size() != n ||
        var.qdot_valid.size() != n) {
        throw PreconditionError("variation series is not aligned with the trajectory");
    }
}

}  // namespace

numerics::MaskedSeries first_order_dL(const Trajectory& traj, const VariationSeries& var)
{
    require_aligned(traj, var);
    const std::size_t n = traj.size();
    numerics::MaskedSeries out{std::vector<double>(n, kNaN), std::vector<bool>(n, false)};
    for (std::size_t i = 0; i < n; ++i) {
        if (var.gap_mask[i] || !var.qdot_valid[i]) {
            continue;
        }
        const auto& s = traj.samples()[i];
        const double dL_dq = -eval_potential(traj.potential(), s.q).dV;
        out.values[i] = dL_dq * var.delta_q[i] + s.p * var.delta_qdot[i];
        out.valid[i] = true;
    }
    return out;
}

std::vector<double> lagrange_residual(const Trajectory& traj)
{
    const auto p = traj.momenta();
    auto r = numerics::derivative2(p, traj.dt());
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] += eval_potential(traj.potential(), traj.samples()[i].q).dV;
    }
    return r;
}

ActionVariation action_and_variation(const Trajectory& traj, const VariationSeries& var, std::size_t i1,
                                     std::size_t i2)
{
    require_aligned(traj, var);
    if (!(i1 < i2) || i2 >= traj.size()) {
        throw PreconditionError("action_and_variation: need i1 < i2 < size");
    }
    for (std::size_t i = i1; i <= i2; ++i) {
        if (var.gap_mask[i] || !var.qdot_valid[i]) {
            std::ostringstream msg;
            msg << "action_and_variation: sample " << i << " lies inside a flagged gap";
            throw PreconditionError(msg.str());
        }
    }
    const auto& s = traj.samples();
    const auto& pot = traj.potential();
    const double m = traj.constants().mass;
    const double dt = traj.dt();
    const auto pdot = numerics::derivative2(traj.momenta(), dt);

    const std::size_t w = i2 - i1 + 1;
    std::vector<double> L(w), Lplus(w), Lminus(w), bulk(w);
    for (std::size_t j = 0; j < w; ++j) {
        const std::size_t i = i1 + j;
        const double qdot = s[i].p / m;
        const double dq = var.delta_q[i];
        const double dqdot = var.delta_qdot[i];
        L[j] = lagrangian_eval(s[i].q, qdot, pot, m).L;
        Lplus[j] = lagrangian_eval(s[i].q + dq, qdot + dqdot, pot, m).L;
        Lminus[j] = lagrangian_eval(s[i].q - dq, qdot - dqdot, pot, m).L;
        const double dL_dq = -eval_potential(pot, s[i].q).dV;
        bulk[j] = (dL_dq - pdot[i]) * dq;
    }

    ActionVariation out{};
    out.A = numerics::trapezoid(L, dt);
    out.dA_boundary = s[i2].p * var.delta_q[i2] - s[i1].p * var.delta_q[i1];
    out.dA_bulk = numerics::trapezoid(bulk, dt);
    // Symmetric difference removes the O(delta_q^2) term of A[q + dq] - A[q].
    out.dA_direct = 0.5 * (numerics::trapezoid(Lplus, dt) - numerics::trapezoid(Lminus, dt));
    return out;
}

}  // namespace cpdq
