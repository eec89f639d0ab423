#ifndef CPDQ_DYNAMICS_HPP
#define CPDQ_DYNAMICS_HPP

#include <cstddef>
#include <vector>

#include "cpdq/core.hpp"
#include "cpdq/numerics.hpp"
#include "cpdq/variational.hpp"

namespace cpdq {

enum class Scheme { leapfrog };

struct IntegratorConfig {
    double dt = 1e-3;
    std::size_t n_steps = 1000;
    Scheme scheme = Scheme::leapfrog;
};

//! Raised when the integrated state leaves the potential's domain or stops being finite.
class IntegrationError : public DomainError {
public:
    IntegrationError(const std::string& what, std::size_t last_valid)
        : DomainError(what), last_valid_(last_valid)
    {
    }
    std::size_t last_valid_index() const { return last_valid_; }

private:
    std::size_t last_valid_;
};

//! Trajectory plus the energy split and the uncertainty band delta_q = f/|p|.
struct TrajectoryRecord {
    Trajectory traj;
    std::vector<double> energy_T;
    std::vector<double> energy_V;
    std::vector<double> energy_E;
    std::vector<double> delta_q_series;  // NaN where gap_mask is set
    std::vector<double> f_series;        // |p| delta_q, NaN where gap_mask is set
    std::vector<bool> gap_mask;

    //! Builds the derived series from an existing trajectory.
    static TrajectoryRecord from_trajectory(Trajectory traj);
};

//! Velocity-Verlet integration of qdot = dH/dp, pdot = -dH/dq with H = p^2/2m + V.
//! The infinite well reflects at the exact collision time inside a step.
TrajectoryRecord integrate_hamilton(const Potential& pot, double q0, double p0, const IntegratorConfig& cfg,
                                    const Constants& consts);

struct CpdqDiagnostics {
    double max_rel_drift;
    std::vector<double> f_series;
    std::size_t masked;
};

//! max |f_series - f| / f over unmasked samples. Throws ComputationError if all are masked.
CpdqDiagnostics cpdq_diagnostics(const TrajectoryRecord& rec, const Constants& consts);

//! pdot + p qdot d(ln delta_q)/dq, where d ln delta_q / dq is a divided difference of the
//! delta_q series against the q series. Valid where the three-point stencil is unmasked.
//! Throws ComputationError if no unmasked run of >= 5 samples exists.
numerics::MaskedSeries newton_uncertainty_residual(const TrajectoryRecord& rec);

struct EnergyBudget {
    std::vector<double> work_energy_residual;  //!< dT + dV per step
    double max_E_drift;                        //!< max |E - E0| / |E0| (absolute when E0 == 0)
};

EnergyBudget energy_budget(const TrajectoryRecord& rec);

}  // namespace cpdq

#endif  // CPDQ_DYNAMICS_HPP
