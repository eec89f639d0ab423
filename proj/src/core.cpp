#include "cpdq/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cpdq {

Constants Constants::natural()
{
    return Constants{0.5, 1.0, 1.0, 1.0, 1.0, 0.5, 1e-9};
}

Constants Constants::si()
{
    constexpr double hbar = 1.054571817e-34;
    constexpr double electron_mass = 9.1093837015e-31;
    // p_floor: 1e-9 of the momentum of an electron at 1 m/s.
    return Constants{hbar / 2.0, hbar, 1.380649e-23, electron_mass, 299792458.0, hbar / 2.0,
                     1e-9 * electron_mass};
}

Constants Constants::for_units(UnitSystem units)
{
    return units == UnitSystem::si ? si() : natural();
}

void Constants::validate() const
{
    auto require = [](bool ok, const char* what) {
        if (!ok) {
            throw PreconditionError(std::string("constants: ") + what + " must be positive and finite");
        }
    };
    auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
    require(positive(f), "f");
    require(positive(hbar), "hbar");
    require(positive(k_boltz), "k_boltz");
    require(positive(mass), "mass");
    require(positive(c), "c");
    require(positive(f_ref), "f_ref");
    require(std::isfinite(p_floor) && p_floor >= 0.0, "p_floor");
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string potential_name(const Potential& pot)
{
    return std::visit(overloaded{
                          [](const FreePotential&) { return std::string("free"); },
                          [](const LinearPotential&) { return std::string("linear"); },
                          [](const HarmonicPotential&) { return std::string("harmonic"); },
                          [](const InfiniteWell&) { return std::string("infinite_well"); },
                          [](const SoftWell&) { return std::string("soft_well"); },
                      },
                      pot);
}

bool in_domain(const Potential& pot, double q)
{
    if (!std::isfinite(q)) {
        return false;
    }
    if (const auto* well = std::get_if<InfiniteWell>(&pot)) {
        return q >= 0.0 && q <= well->L;
    }
    return true;
}

PotentialValue eval_potential(const Potential& pot, double q)
{
    if (!in_domain(pot, q)) {
        std::ostringstream msg;
        msg << "q = " << q << " outside the domain of the " << potential_name(pot) << " potential";
        throw DomainError(msg.str());
    }
    return std::visit(overloaded{
                          [](const FreePotential&) { return PotentialValue{0.0, 0.0, 0.0}; },
                          [q](const LinearPotential& p) { return PotentialValue{-p.F0 * q, -p.F0, 0.0}; },
                          [q](const HarmonicPotential& p) {
                              const double k = p.m * p.omega * p.omega;
                              return PotentialValue{0.5 * k * q * q, k * q, k};
                          },
                          [](const InfiniteWell&) { return PotentialValue{0.0, 0.0, 0.0}; },
                          [q](const SoftWell& p) {
                              const double x = q / p.a;
                              const double s = 1.0 / std::cosh(x);
                              const double t = std::tanh(x);
                              const double s2 = s * s;
                              return PotentialValue{-p.V0 * s2, 2.0 * p.V0 * s2 * t / p.a,
                                                    2.0 * p.V0 / (p.a * p.a) * (s2 * s2 - 2.0 * s2 * t * t)};
                          },
                      },
                      pot);
}

double potential_min(const Potential& pot, double lo, double hi)
{
    return std::visit(overloaded{
                          [](const FreePotential&) { return 0.0; },
                          [&](const LinearPotential& p) { return std::min(-p.F0 * lo, -p.F0 * hi); },
                          [&](const HarmonicPotential& p) {
                              const double q = std::clamp(0.0, lo, hi);
                              return 0.5 * p.m * p.omega * p.omega * q * q;
                          },
                          [](const InfiniteWell&) { return 0.0; },
                          [&](const SoftWell& p) {
                              const double q = std::clamp(0.0, lo, hi);
                              const double s = 1.0 / std::cosh(q / p.a);
                              return -p.V0 * s * s;
                          },
                      },
                      pot);
}

double compton_floor(double mass, const Constants& consts)
{
    if (!(mass > 0.0)) {
        throw PreconditionError("compton_floor: mass must be positive");
    }
    if (std::isinf(mass)) {
        return 0.0;
    }
    const double lambda_c = consts.planck_h() / (mass * consts.c);
    return lambda_c / (4.0 * kPi);
}

DofState DofState::make(double t, double q, double p, const Constants& consts)
{
    DofState s{t, q, p, std::nullopt};
    if (std::abs(p) > consts.p_floor) {
        s.delta_q = consts.f / std::abs(p);
    }
    return s;
}

}  // namespace cpdq
