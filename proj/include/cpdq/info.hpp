#ifndef CPDQ_INFO_HPP
#define CPDQ_INFO_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "cpdq/core.hpp"
#include "cpdq/dynamics.hpp"
#include "cpdq/quantum.hpp"
#include "cpdq/thermo.hpp"

namespace cpdq {

//! Per-step position and momentum information increments, in bits.
//!
//! Masked steps (turning points) carry zeros and do not contribute to the cumulative sum.
struct InfoLedger {
    std::vector<double> dI_q;
    std::vector<double> dI_p;
    std::vector<double> I_cumulative;  //!< prefix sum of dI_q + dI_p
    std::vector<bool> valid;
    std::vector<double> dt;   //!< step duration
    std::vector<double> tau;  //!< time to cross one uncertainty interval, delta_q / |qdot| = f / k theta

    double total() const { return I_cumulative.empty() ? 0.0 : I_cumulative.back(); }
};

//! dI_q = dW / k theta, dI_p = -dT / k theta with k theta = p qdot averaged over the step.
//! Steps touching the turning-point mask (margin kTurningMargin) are skipped.
//! Throws ComputationError when every step is masked.
InfoLedger info_ledger(const TrajectoryRecord& rec, const Constants& consts);

//! Between record points, dW / k theta and -dT / k theta integrated along the change
//! with k theta = p qdot = 2E: dI_q = -d ln L / ln 2 and dI_p = -d ln p / ln 2.
InfoLedger info_ledger(const PistonRecord& rec, const Constants& consts);

enum class RegimeLabel {
    classical_mechanics_or_adiabatic_eq,
    quantum_mechanics,
    nonadiabatic_equilibrium_td,
    nonadiabatic_nonequilibrium,
};

std::string regime_label_name(RegimeLabel label);

struct RegimeThresholds {
    double tol_zero = 1e-6;  //!< bits
    double tol_small = 0.1;  //!< bits
};

struct RegimeMetrics {
    double mean_abs_dI;    //!< mean over valid steps of |dI_q + dI_p|
    double max_step_dI_q;  //!< largest |change| of I_q across one uncertainty interval
    double max_step_dI_p;
};

struct RegimeReport {
    RegimeMetrics metrics;
    RegimeThresholds thresholds;
    RegimeLabel label;
};

//! Per-interval changes are the step increments rescaled to one crossing time:
//! dI tau / dt, or the whole increment for a zero-duration step.
RegimeMetrics regime_metrics(const InfoLedger& ledger);

//! A stationary profile exchanges nothing on average; the per-interval change is
//! validity_metric / ln 2, maximized over points with k >= kTurningMargin * max k.
RegimeMetrics regime_metrics(const WkbProfile& profile);

//! Throws PreconditionError for negative or NaN metrics.
RegimeReport regime_classify(const RegimeMetrics& metrics, const RegimeThresholds& thresholds = {});

struct RateBounds {
    double bound_f;          //!< E / (f ln 2)
    double bound_h;          //!< 4 pi E / (h ln 2)
    double bremermann;       //!< ln(1 + 4 pi) E / h
    double bekenstein;       //!< 2 pi^2 E / (h ln 2)
    double energy_rate_cap;  //!< (k theta)^2 / 2f
    double per_interval_cap; //!< 1 / (2 ln 2)
    double continuous_bound; //!< sqrt(energy_rate_cap / 2f) / ln 2
    double continuous_bound_hbar;  //!< same with f = hbar / 2
    double pendry;           //!< sqrt(pi energy_rate_cap / 3 hbar) / ln 2
    double pendry_ratio;     //!< pendry / continuous_bound_hbar = sqrt(pi / 3)
};

//! Throws PreconditionError unless E, theta and f are positive.
RateBounds rate_bounds(double E, double theta, const Constants& consts);

}  // namespace cpdq

#endif  // CPDQ_INFO_HPP
