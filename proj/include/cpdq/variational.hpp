#ifndef CPDQ_VARIATIONAL_HPP
#define CPDQ_VARIATIONAL_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "cpdq/core.hpp"
#include "cpdq/numerics.hpp"

namespace cpdq {

//! Uniformly sampled (t, q, p) history of one degree of freedom in a static potential.
//!
//! The Lagrangian is always L = m qdot^2 / 2 - V(q) with m = consts.mass, so the
//! momentum samples double as dL/dqdot.
class Trajectory {
public:
    //! Validates: >= 5 samples, strictly increasing t with spacing dt (1e-12 relative).
    Trajectory(std::vector<DofState> samples, double dt, Potential pot, Constants consts);

    //! Samples q(t), p(t) at t0 + i dt, i = 0..n-1.
    static Trajectory sample(const std::function<double(double)>& q, const std::function<double(double)>& p,
                             double t0, double dt, std::size_t n, const Potential& pot, const Constants& consts);

    const std::vector<DofState>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    double dt() const { return dt_; }
    const Potential& potential() const { return pot_; }
    const Constants& constants() const { return consts_; }

    std::vector<double> times() const;
    std::vector<double> positions() const;
    std::vector<double> momenta() const;

private:
    std::vector<DofState> samples_;
    double dt_;
    Potential pot_;
    Constants consts_;
};

//! Adds eta(t) = amplitude sin(omega t) to q and m eta'(t) to p, giving a smooth
//! path that no longer solves the equation of motion.
Trajectory perturb(const Trajectory& traj, double amplitude, double omega);

//! True where |p| <= max(p_floor, margin * max|p|). margin = 0 gives the bare gap mask.
std::vector<bool> turning_point_mask(const Trajectory& traj, double margin);

//! Margin used by the bundled checks.
inline constexpr double kTurningMargin = 0.3;

enum class VariationSource { special, custom };

struct VariationSeries {
    double epsilon = 0.0;
    std::vector<double> delta_q;      // NaN inside gaps
    std::vector<double> delta_qdot;   // NaN where the difference stencil touches a gap
    std::vector<bool> gap_mask;       // |p| <= p_floor (special variations only)
    std::vector<bool> qdot_valid;
    VariationSource source = VariationSource::special;
};

struct LagrangianValue {
    double L;
    double p;
};

//! L = m qdot^2 / 2 - V(q), p = m qdot.
LagrangianValue lagrangian_eval(double q, double qdot, const Potential& pot, double mass);

//! delta_q = epsilon / p with gaps flagged at |p| <= p_floor; delta_qdot by central differences.
VariationSeries special_variation(const Trajectory& traj, double epsilon);

//! Arbitrary variation delta_q(t_i) supplied by the caller.
VariationSeries custom_variation(const Trajectory& traj, std::vector<double> delta_q);

//! Default epsilon: 1e-6 f.
inline double default_epsilon(const Constants& consts) { return 1e-6 * consts.f; }

//! First-order change of L: (dL/dq) delta_q + (dL/dqdot) delta_qdot, per sample.
numerics::MaskedSeries first_order_dL(const Trajectory& traj, const VariationSeries& var);

//! d/dt(dL/dqdot) - dL/dq = pdot + V'(q), with pdot by central differences.
std::vector<double> lagrange_residual(const Trajectory& traj);

struct ActionVariation {
    double A;            //!< trapezoidal integral of L over [t_i1, t_i2]
    double dA_boundary;  //!< p delta_q at i2 minus at i1
    double dA_bulk;      //!< integral of (dL/dq - d/dt dL/dqdot) delta_q
    double dA_direct;    //!< first-order A[q + delta_q] - A[q], by re-evaluating the action
};

//! Action over the window [i1, i2] and its variation, split by integration by parts.
//! Throws PreconditionError for bad indices or flagged samples inside the window.
ActionVariation action_and_variation(const Trajectory& traj, const VariationSeries& var, std::size_t i1,
                                     std::size_t i2);

}  // namespace cpdq

#endif  // CPDQ_VARIATIONAL_HPP
