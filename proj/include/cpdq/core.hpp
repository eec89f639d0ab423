#ifndef CPDQ_CORE_HPP
#define CPDQ_CORE_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace cpdq {

//! Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

//! A position (or grid) lies outside the domain of a potential.
class DomainError : public Error {
public:
    using Error::Error;
};

//! A documented precondition of an operation was violated by its inputs.
class PreconditionError : public Error {
public:
    using Error::Error;
};

//! A numerical procedure could not produce a result (all-masked data, empty region, ...).
class ComputationError : public Error {
public:
    using Error::Error;
};

inline constexpr double kPi = 3.14159265358979323846;

enum class UnitSystem { natural, si };

//! Physical constants of a run.
//!
//! `f` is the action carried by one uncertainty interval (p * delta_q = f). It defaults
//! to hbar/2; `f_ref` fixes the zero of entropy, S = k ln(f / f_ref).
struct Constants {
    double f;
    double hbar;
    double k_boltz;
    double mass;
    double c;
    double f_ref;
    double p_floor;

    //! hbar = m = k_B = c = 1, f = 1/2, p_floor = 1e-9.
    static Constants natural();
    //! CODATA SI values, electron mass.
    static Constants si();
    static Constants for_units(UnitSystem units);

    double planck_h() const { return 2.0 * kPi * hbar; }

    //! Throws PreconditionError if any positivity invariant fails.
    void validate() const;
};

// Built-in one-dimensional potentials.
struct FreePotential {};
//! V = -F0 q (constant force +F0).
struct LinearPotential {
    double F0;
};
//! V = m w^2 q^2 / 2.
struct HarmonicPotential {
    double m;
    double omega;
};
//! Zero inside [0, L]; the walls are handled as reflecting boundaries by consumers.
struct InfiniteWell {
    double L;
};
//! V = -V0 sech^2(q / a).
struct SoftWell {
    double V0;
    double a;
};

using Potential = std::variant<FreePotential, LinearPotential, HarmonicPotential, InfiniteWell, SoftWell>;

struct PotentialValue {
    double V;
    double dV;
    double d2V;
};

std::string potential_name(const Potential& pot);

//! Whether q lies in the potential's domain (only the infinite well is restricted).
bool in_domain(const Potential& pot, double q);

//! Analytic V, V', V''. Throws DomainError outside the domain.
PotentialValue eval_potential(const Potential& pot, double q);

//! Minimum of V over the closed interval [lo, hi] (analytic for the built-ins).
double potential_min(const Potential& pot, double lo, double hi);

//! delta_q_min = lambda_c / 4 pi with lambda_c = h / (m c).
double compton_floor(double mass, const Constants& consts);

//! One sample of a single degree of freedom. `delta_q` is empty at |p| <= p_floor.
struct DofState {
    double t;
    double q;
    double p;
    std::optional<double> delta_q;

    static DofState make(double t, double q, double p, const Constants& consts);
    bool gap() const { return !delta_q.has_value(); }
};

}  // namespace cpdq

#endif  // CPDQ_CORE_HPP
