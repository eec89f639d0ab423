#ifndef CPDQ_QUANTUM_HPP
#define CPDQ_QUANTUM_HPP

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cpdq/core.hpp"

namespace cpdq {

//! Uniform grid including both end points.
struct Grid1D {
    double x_min;
    double x_max;
    std::size_t n;

    //! Throws PreconditionError unless n >= 64 and x_max > x_min.
    Grid1D(double lo, double hi, std::size_t points);

    double h() const { return (x_max - x_min) / static_cast<double>(n - 1); }
    double x(std::size_t i) const { return x_min + static_cast<double>(i) * h(); }
    std::vector<double> points() const;
};

using Complex = std::complex<double>;

struct WaveFunction {
    Grid1D grid;
    std::vector<Complex> values;

    //! Trapezoidal integral of |psi|^2.
    double norm2() const;
    //! Scales to unit norm. Throws ComputationError for a zero function.
    void normalize();
    std::vector<double> probability() const;
    double mean_x() const;
    double std_dev() const;

    //! Samples psi(x) on the grid and normalizes.
    template <class F>
    static WaveFunction sample(const Grid1D& grid, F&& psi)
    {
        WaveFunction w{grid, std::vector<Complex>(grid.n)};
        for (std::size_t i = 0; i < grid.n; ++i) {
            w.values[i] = Complex(psi(grid.x(i)));
        }
        w.normalize();
        return w;
    }
};

struct EigenSolution {
    std::vector<double> energies;
    std::vector<WaveFunction> states;
    std::vector<std::string> warnings;  //!< e.g. states that are not bound on the grid
};

//! Lowest eigenpairs of the three-point Dirichlet discretization of
//! -(2 f^2 / m) psi'' + V psi = E psi. Eigenvectors are real, normalized, and signed so
//! that the first non-negligible lobe is positive.
EigenSolution solve_tise(const Potential& pot, const Grid1D& grid, std::size_t n_states, const Constants& consts);

struct FisherMetrics {
    double fi_classical;     //!< integral of P'^2 / P
    double fi_generalized;   //!< integral of 4 |psi'|^2
    double fisher_length;    //!< fi_generalized^(-1/2)
    double correction;       //!< integral of P (psi*'/psi* - psi'/psi)^2 = -4 integral of P (Im psi'/psi)^2
    double decomposition_residual;  //!< |fi_classical - fi_generalized - correction|
};

//! Derivatives use 9-point stencils; P is floored at 1e-14 max P, and the P'^2/P and
//! correction integrands are interpolated across floored samples (nodes).
FisherMetrics fisher_metrics(const WaveFunction& psi);

//! (delta_x)^2 * fi_generalized - 1; non-negative when the bound holds.
double cr_bound_check(const WaveFunction& psi, double delta_x);

class VariationalNonConvergence : public ComputationError {
public:
    VariationalNonConvergence(const std::string& what, WaveFunction last, double energy)
        : ComputationError(what), last_(std::move(last)), energy_(energy)
    {
    }
    const WaveFunction& last_iterate() const { return last_; }
    double last_energy() const { return energy_; }

private:
    WaveFunction last_;
    double energy_;
};

struct VariationalResult {
    WaveFunction psi;
    double E;
    std::size_t iterations;
};

//! Value of the discrete energy functional sum (2 f^2/m) |psi_{i+1} - psi_i|^2 / h + V |psi|^2 h
//! for a normalized psi with Dirichlet ends.
double energy_functional(const Potential& pot, const WaveFunction& psi, const Constants& consts);

//! Minimizes the energy functional over normalized psi by implicit imaginary-time
//! steps (I + tau (H - V_min)) psi' = psi, renormalizing after each step.
//! Stops once the relative change of E drops below tol.
VariationalResult variational_ground_state(const Potential& pot, const Grid1D& grid, const Constants& consts,
                                           std::size_t max_iters, double tol,
                                           const std::optional<WaveFunction>& initial = std::nullopt);

struct WkbProfile {
    Grid1D grid;
    double E;
    std::vector<double> k_of_x;          //!< NaN where classically forbidden
    std::vector<double> delta_x_of_x;    //!< 1 / (2 k)
    std::vector<double> validity_metric; //!< |V'| delta_x / (2 (E - V))
    std::vector<bool> allowed;
};

//! Local plane-wave profile k(x) = sqrt((E - V) / 4C), C = f^2 / 2m.
//! Throws ComputationError when E <= V everywhere on the grid.
WkbProfile local_wkb_profile(const Potential& pot, double E, const Grid1D& grid, const Constants& consts);

struct AppendixAResult {
    double max_residual;               //!< max |pdot + V'| / max |V'| over the admitted region
    std::size_t admitted;
    std::vector<double> recovered_force;  //!< pdot from delta_x(x); NaN outside the region
};

//! Recovers the force from delta_x(x) = 1 / 2k(x) through pdot = -(p xdot / delta_x) d delta_x / dx
//! on the region E - V >= 0.1 E. Throws ComputationError when that region is empty.
AppendixAResult appendix_a_consistency(const Potential& pot, double E, const Grid1D& grid, const Constants& consts);

//! Fisher length of psi restricted to the node-to-node window around grid index i.
//! Throws ComputationError when no bracketing pair of nodes exists.
double local_fisher_length(const WaveFunction& psi, std::size_t i);

struct DispersionParams {
    double k;
    double m0;
    double c;
    double f;
};

struct DispersionResult {
    double kg_residual;
    double omega_kg;
    double nr_residual;  //!< NaN for m0 == 0
    double omega_nr;     //!< NaN for m0 == 0
};

//! Plane waves exp(i(kx - wt)) substituted into the Klein-Gordon equation with mass
//! term m0^2 c^2 / 4 f^2, and into the free Schroedinger equation with hbar = 2 f.
DispersionResult dispersion_checks(const DispersionParams& params, const Constants& consts);

//! h / (dE0)^2 * dV/dt for the lowest level spacing of `energies`. Reported, not asserted.
double bohm_adiabaticity(const std::vector<double>& energies, double dV_dt, const Constants& consts);

}  // namespace cpdq

#endif  // CPDQ_QUANTUM_HPP
