#ifndef CPDQ_THERMO_HPP
#define CPDQ_THERMO_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "cpdq/core.hpp"

namespace cpdq {

//! The particle could not keep up with the wall (|u| >= v), so the bounce model no longer applies.
class ModelViolationError : public ComputationError {
public:
    using ComputationError::ComputationError;
};

enum class PistonMode { constant_speed, sudden_jump };

//! One particle in [0, L(t)] with a fixed wall at 0 and a wall moving at speed u.
//!
//! The particle starts at the moving wall heading inward at speed v0, so every
//! recorded moving-wall collision samples the same phase of the bounce cycle.
struct PistonConfig {
    double L0 = 1.0;
    double wall_speed = 0.0;  //!< u; positive expands
    double v0 = 1.0;
    double mass = 1.0;
    std::optional<double> t_end;
    std::optional<double> L_end;
    PistonMode mode = PistonMode::constant_speed;
    std::size_t settle_bounces = 2;  //!< moving-wall hits kept after a sudden jump when t_end is unset
    std::size_t max_collisions = 50'000'000;

    void validate() const;
};

enum class PistonEventKind { start, moving_wall, fixed_wall, jump };

struct PistonEvent {
    PistonEventKind kind;
    double t;
    double L;      //!< wall position at the event
    double speed;  //!< particle speed after the event
};

//! Event history plus the identified thermodynamic quantities at the record points
//! (start, jump and moving-wall events; fixed-wall hits change neither |p| nor the phase).
struct PistonRecord {
    PistonConfig cfg;
    std::vector<PistonEvent> events;

    // Record points.
    std::vector<double> t;
    std::vector<double> L;
    std::vector<double> p;      //!< m v after the event
    std::vector<double> f;      //!< p L
    std::vector<double> S;      //!< k ln(f / f_ref)
    std::vector<double> theta;  //!< p qdot / k
    std::vector<double> P;      //!< p qdot / L

    std::size_t points() const { return t.size(); }
};

//! Event-driven simulation with closed-form collision times.
//! Throws ModelViolationError when the particle can no longer reach the moving wall.
PistonRecord piston_simulate(const PistonConfig& cfg, const Constants& consts);

struct HeatTheoremResidual {
    std::vector<double> residual;      //!< dE - theta dS + P dVol per interval
    std::vector<double> log_residual;  //!< d ln f - d ln p - d ln delta_q per interval
    std::vector<double> dE;
};

//! Interval-wise heat-theorem residual with midpoint theta and P. Needs >= 2 record points.
HeatTheoremResidual heat_theorem_residual(const PistonRecord& rec, const Constants& consts);

//! Per-interval thermodynamic and extended-mechanics quantities.
//!
//! Increments are kept alongside rates so that zero-duration intervals (a sudden
//! jump) can still be compared; rates are NaN there.
struct ThermoSeries {
    std::vector<double> dt;
    std::vector<double> dE;
    std::vector<double> dS;
    std::vector<double> dVol;
    std::vector<double> theta;
    std::vector<double> P;

    std::vector<double> dA_ext;       //!< delta L^e dt = pdot delta_q dt + p delta_qdot dt
    std::vector<double> dH_ext;       //!< along-motion change of H^e over the interval
    std::vector<double> df;           //!< f2 - f1
    std::vector<double> f_dS_over_k;  //!< integral of (f / k) dS over the interval

    std::vector<double> L_ext_rate;  //!< delta L^e
    std::vector<double> f_rate;      //!< fdot
    std::vector<double> fS_rate;     //!< (f / k) Sdot

    std::vector<double> err_entropy;  //!< rel. difference of dA_ext and f_dS_over_k
    std::vector<double> err_fdot;     //!< rel. difference of dA_ext and df

    double action_over_f = 0.0;   //!< sum of integral d(delta A^e) / f
    double entropy_over_k = 0.0;  //!< (S_end - S_0) / k
};

//! Needs >= 3 record points.
ThermoSeries extended_quantities(const PistonRecord& rec, const Constants& consts);

//! Signed change of ln(p L) between the start and the moment the wall reaches
//! L_target, interpolated linearly in ln L between record points.
double delta_ln_pL_at(const PistonRecord& rec, double L_target);

struct ScanRow {
    double ratio;
    double delta_ln_pL;  //!< |change of ln(p L)| over the expansion
    double delta_S_over_k;
};

struct AdiabaticScan {
    std::vector<ScanRow> rows;
    std::optional<double> largest_ratio_below;  //!< largest ratio with violation < threshold
    bool monotone = true;                       //!< violations non-decreasing in ratio (1e-12 slack)
};

//! Runs one constant-speed expansion per u/v ratio (ascending order is not required)
//! from the template's L0 to its L_end (default 2 L0).
AdiabaticScan adiabatic_scan(const std::vector<double>& ratios, const PistonConfig& tmpl, const Constants& consts,
                             double threshold = 1e-2);

}  // namespace cpdq

#endif  // CPDQ_THERMO_HPP
