#include "cpdq/quantum.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cpdq/numerics.hpp"

namespace cpdq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double kinetic_coefficient(const Constants& consts)
{
    return 2.0 * consts.f * consts.f / consts.mass;
}

std::vector<double> potential_on_grid(const Potential& pot, const Grid1D& grid)
{
    std::vector<double> V(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        V[i] = eval_potential(pot, grid.x(i)).V;
    }
    return V;
}

// Solves the symmetric tridiagonal system (diag, off) x = rhs in place.
void thomas_solve(const std::vector<double>& diag, double off, std::vector<double>& rhs)
{
    const std::size_t n = diag.size();
    std::vector<double> c(n);
    double beta = diag[0];
    rhs[0] /= beta;
    for (std::size_t i = 1; i < n; ++i) {
        c[i] = off / beta;
        beta = diag[i] - off * c[i];
        rhs[i] = (rhs[i] - off * rhs[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] -= c[i + 1] * rhs[i + 1];
    }
}

void fix_sign(std::vector<Complex>& v)
{
    double peak = 0.0;
    for (const auto& z : v) {
        peak = std::max(peak, std::abs(z.real()));
    }
    for (const auto& z : v) {
        if (std::abs(z.real()) > 1e-3 * peak) {
            if (z.real() < 0.0) {
                for (auto& w : v) {
                    w = -w;
                }
            }
            return;
        }
    }
}

}  // namespace

Grid1D::Grid1D(double lo, double hi, std::size_t points) : x_min(lo), x_max(hi), n(points)
{
    if (points < 64) {
        throw PreconditionError("Grid1D: at least 64 points required");
    }
    if (!(hi > lo)) {
        throw PreconditionError("Grid1D: x_max must exceed x_min");
    }
}

std::vector<double> Grid1D::points() const
{
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = x(i);
    }
    return xs;
}

double WaveFunction::norm2() const
{
    return numerics::trapezoid(probability(), grid.h());
}

void WaveFunction::normalize()
{
    const double n2 = norm2();
    if (!(n2 > 0.0) || !std::isfinite(n2)) {
        throw ComputationError("WaveFunction: cannot normalize a zero or non-finite function");
    }
    const double s = 1.0 / std::sqrt(n2);
    for (auto& z : values) {
        z *= s;
    }
}

std::vector<double> WaveFunction::probability() const
{
    std::vector<double> P(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        P[i] = std::norm(values[i]);
    }
    return P;
}

double WaveFunction::mean_x() const
{
    const auto P = probability();
    std::vector<double> xP(P.size());
    for (std::size_t i = 0; i < P.size(); ++i) {
        xP[i] = grid.x(i) * P[i];
    }
    return numerics::trapezoid(xP, grid.h()) / numerics::trapezoid(P, grid.h());
}

double WaveFunction::std_dev() const
{
    const auto P = probability();
    const double mu = mean_x();
    std::vector<double> d2(P.size());
    for (std::size_t i = 0; i < P.size(); ++i) {
        const double d = grid.x(i) - mu;
        d2[i] = d * d * P[i];
    }
    return std::sqrt(numerics::trapezoid(d2, grid.h()) / numerics::trapezoid(P, grid.h()));
}

EigenSolution solve_tise(const Potential& pot, const Grid1D& grid, std::size_t n_states, const Constants& consts)
{
    consts.validate();
    const std::size_t m = grid.n - 2;
    if (n_states == 0 || n_states > m) {
        throw PreconditionError("solve_tise: n_states must lie in [1, n - 2]");
    }
    const double h = grid.h();
    const double C = kinetic_coefficient(consts);
    const auto V = potential_on_grid(pot, grid);

    std::vector<double> d(m), e(m > 1 ? m - 1 : 1, -C / (h * h));
    for (std::size_t i = 0; i < m; ++i) {
        d[i] = 2.0 * C / (h * h) + V[i + 1];
    }
    std::vector<double> w(m);
    std::vector<double> z(m * n_states);
    std::vector<lapack_int> ifail(m);
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dstevx(LAPACK_COL_MAJOR, 'V', 'I', static_cast<lapack_int>(m), d.data(), e.data(),
                                           0.0, 0.0, 1, static_cast<lapack_int>(n_states), 0.0, &found, w.data(),
                                           z.data(), static_cast<lapack_int>(m), ifail.data());
    if (info != 0 || found != static_cast<lapack_int>(n_states)) {
        std::ostringstream msg;
        msg << "solve_tise: tridiagonal eigensolver failed (info = " << info << ")";
        throw ComputationError(msg.str());
    }

    EigenSolution sol;
    const bool walls = std::holds_alternative<InfiniteWell>(pot);
    const double V_edge = std::min(V.front(), V.back());
    const double scale = 1.0 / std::sqrt(h);
    for (std::size_t s = 0; s < n_states; ++s) {
        WaveFunction psi{grid, std::vector<Complex>(grid.n, Complex(0.0))};
        double peak = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            psi.values[i + 1] = Complex(z[s * m + i] * scale);
            peak = std::max(peak, std::abs(z[s * m + i]));
        }
        fix_sign(psi.values);
        sol.energies.push_back(w[s]);
        sol.states.push_back(std::move(psi));
        if (walls) {
            continue;
        }
        if (V_edge <= w[s]) {
            std::ostringstream msg;
            msg << "state " << s << " is not bound on the grid (E = " << w[s] << ", edge V = " << V_edge << ")";
            sol.warnings.push_back(msg.str());
        } else if (std::max(std::abs(z[s * m]), std::abs(z[s * m + m - 1])) > 1e-8 * peak) {
            std::ostringstream msg;
            msg << "state " << s << " has not decayed to 1e-8 of its peak at the grid edges";
            sol.warnings.push_back(msg.str());
        }
    }
    return sol;
}

FisherMetrics fisher_metrics(const WaveFunction& psi)
{
    const std::size_t n = psi.values.size();
    const double h = psi.grid.h();
    const auto P = psi.probability();
    const double maxP = *std::max_element(P.begin(), P.end());
    if (!(maxP > 0.0)) {
        throw ComputationError("fisher_metrics: wave function vanishes everywhere");
    }
    const auto dpsi = numerics::derivative_high_order(std::span<const Complex>(psi.values), h);
    const auto dP = numerics::derivative_high_order(std::span<const double>(P), h);

    const double floor = 1e-14 * maxP;
    std::vector<double> gen(n), cls(n, kNaN), corr(n, kNaN);
    for (std::size_t i = 0; i < n; ++i) {
        gen[i] = 4.0 * std::norm(dpsi[i]);
        if (P[i] > floor) {
            cls[i] = dP[i] * dP[i] / P[i];
            const double im = (std::conj(psi.values[i]) * dpsi[i]).imag();
            corr[i] = -4.0 * im * im / P[i];
        }
    }
    // Floored runs: the correction integrand is bridged linearly between interior
    // neighbours (constant phase gradient towards the edges), and the classical one
    // takes its pointwise limit 4|psi'|^2 + correction.
    std::size_t i = 0;
    while (i < n) {
        if (!std::isnan(corr[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && std::isnan(corr[j])) {
            ++j;
        }
        for (std::size_t k = i; k < j; ++k) {
            if (i > 0 && j < n) {
                const double w = static_cast<double>(k - i + 1) / static_cast<double>(j - i + 1);
                corr[k] = (1.0 - w) * corr[i - 1] + w * corr[j];
            } else if (i > 0) {
                corr[k] = corr[i - 1] / P[i - 1] * P[k];
            } else if (j < n) {
                corr[k] = corr[j] / P[j] * P[k];
            } else {
                corr[k] = 0.0;
            }
            cls[k] = gen[k] + corr[k];
        }
        i = j;
    }

    FisherMetrics fm{};
    fm.fi_generalized = numerics::trapezoid(gen, h);
    fm.fi_classical = numerics::trapezoid(cls, h);
    fm.correction = numerics::trapezoid(corr, h);
    if (!(fm.fi_generalized > 0.0)) {
        throw ComputationError("fisher_metrics: generalized Fisher information is zero");
    }
    fm.fisher_length = 1.0 / std::sqrt(fm.fi_generalized);
    fm.decomposition_residual = std::abs(fm.fi_classical - fm.fi_generalized - fm.correction);
    return fm;
}

double cr_bound_check(const WaveFunction& psi, double delta_x)
{
    return delta_x * delta_x * fisher_metrics(psi).fi_generalized - 1.0;
}

double energy_functional(const Potential& pot, const WaveFunction& psi, const Constants& consts)
{
    const double h = psi.grid.h();
    const double C = kinetic_coefficient(consts);
    const std::size_t n = psi.values.size();
    double kin = 0.0;
    double pot_e = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        kin += std::norm(psi.values[i + 1] - psi.values[i]);
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double p = std::norm(psi.values[i]);
        pot_e += eval_potential(pot, psi.grid.x(i)).V * p;
        norm += p;
    }
    return (C * kin / h + pot_e * h) / (norm * h);
}

VariationalResult variational_ground_state(const Potential& pot, const Grid1D& grid, const Constants& consts,
                                           std::size_t max_iters, double tol,
                                           const std::optional<WaveFunction>& initial)
{
    consts.validate();
    if (!(tol > 0.0) || max_iters == 0) {
        throw PreconditionError("variational_ground_state: need tol > 0 and max_iters >= 1");
    }
    const double h = grid.h();
    const double C = kinetic_coefficient(consts);
    const auto V = potential_on_grid(pot, grid);
    const std::size_t m = grid.n - 2;
    const double V_min = *std::min_element(V.begin() + 1, V.end() - 1);

    WaveFunction psi{grid, std::vector<Complex>(grid.n, Complex(0.0))};
    if (initial) {
        if (initial->values.size() != grid.n || initial->grid.n != grid.n || initial->grid.x_min != grid.x_min ||
            initial->grid.x_max != grid.x_max) {
            throw PreconditionError("variational_ground_state: initial guess lives on a different grid");
        }
        psi.values = initial->values;
        psi.values.front() = psi.values.back() = Complex(0.0);
    } else {
        const double span = grid.x_max - grid.x_min;
        for (std::size_t i = 1; i + 1 < grid.n; ++i) {
            psi.values[i] = Complex(std::sin(kPi * (grid.x(i) - grid.x_min) / span));
        }
    }
    psi.normalize();
    double E = energy_functional(pot, psi, consts);

    std::vector<double> re(m), im(m), diag(m);
    const double off_unit = -C / (h * h);
    for (std::size_t it = 1; it <= max_iters; ++it) {
        const double tau = 50.0 / std::max(E - V_min, 1e-300);
        for (std::size_t i = 0; i < m; ++i) {
            diag[i] = 1.0 + tau * (2.0 * C / (h * h) + V[i + 1] - V_min);
            re[i] = psi.values[i + 1].real();
            im[i] = psi.values[i + 1].imag();
        }
        thomas_solve(diag, tau * off_unit, re);
        thomas_solve(diag, tau * off_unit, im);
        for (std::size_t i = 0; i < m; ++i) {
            psi.values[i + 1] = Complex(re[i], im[i]);
        }
        psi.normalize();
        const double E_new = energy_functional(pot, psi, consts);
        const double change = std::abs(E_new - E) / std::max(std::abs(E_new), std::numeric_limits<double>::min());
        E = E_new;
        if (change < tol) {
            fix_sign(psi.values);
            return {std::move(psi), E, it};
        }
    }
    std::ostringstream msg;
    msg << "variational_ground_state: no convergence after " << max_iters << " iterations (E = " << E << ")";
    throw VariationalNonConvergence(msg.str(), psi, E);
}

WkbProfile local_wkb_profile(const Potential& pot, double E, const Grid1D& grid, const Constants& consts)
{
    consts.validate();
    const double C = consts.f * consts.f / (2.0 * consts.mass);
    WkbProfile prof{grid, E, std::vector<double>(grid.n, kNaN), std::vector<double>(grid.n, kNaN),
                    std::vector<double>(grid.n, kNaN), std::vector<bool>(grid.n, false)};
    std::size_t allowed = 0;
    for (std::size_t i = 0; i < grid.n; ++i) {
        const auto pv = eval_potential(pot, grid.x(i));
        const double kin = E - pv.V;
        if (!(kin > 0.0)) {
            continue;
        }
        const double k = std::sqrt(kin / (4.0 * C));
        const double dx = 1.0 / (2.0 * k);
        prof.k_of_x[i] = k;
        prof.delta_x_of_x[i] = dx;
        prof.validity_metric[i] = std::abs(pv.dV) * dx / (2.0 * kin);
        prof.allowed[i] = true;
        ++allowed;
    }
    if (allowed == 0) {
        throw ComputationError("local_wkb_profile: E lies below V everywhere on the grid");
    }
    return prof;
}

AppendixAResult appendix_a_consistency(const Potential& pot, double E, const Grid1D& grid, const Constants& consts)
{
    const auto prof = local_wkb_profile(pot, E, grid, consts);
    const double h = grid.h();
    const double m = consts.mass;
    std::vector<bool> admit(grid.n, false);
    std::vector<double> dV(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const auto pv = eval_potential(pot, grid.x(i));
        dV[i] = pv.dV;
        admit[i] = prof.allowed[i] && E - pv.V >= 0.1 * E;
    }
    AppendixAResult out{0.0, 0, std::vector<double>(grid.n, kNaN)};
    double max_res = 0.0;
    double max_force = 0.0;
    for (std::size_t i = 1; i + 1 < grid.n; ++i) {
        if (!(admit[i - 1] && admit[i] && admit[i + 1])) {
            continue;
        }
        const double dx = prof.delta_x_of_x[i];
        const double p = consts.f / dx;
        const double xdot = p / m;
        const double ddx = (prof.delta_x_of_x[i + 1] - prof.delta_x_of_x[i - 1]) / (2.0 * h);
        const double pdot = -(p * xdot / dx) * ddx;
        out.recovered_force[i] = pdot;
        max_res = std::max(max_res, std::abs(pdot + dV[i]));
        max_force = std::max(max_force, std::abs(dV[i]));
        ++out.admitted;
    }
    if (out.admitted == 0) {
        throw ComputationError("appendix_a_consistency: no grid point satisfies E - V >= 0.1 E");
    }
    out.max_residual = max_force > 0.0 ? max_res / max_force : max_res;
    return out;
}

double local_fisher_length(const WaveFunction& psi, std::size_t i)
{
    const std::size_t n = psi.values.size();
    if (i >= n) {
        throw PreconditionError("local_fisher_length: index outside the grid");
    }
    auto sign_change = [&](std::size_t a) {
        const double u = psi.values[a].real();
        const double v = psi.values[a + 1].real();
        return (u > 0.0 && v <= 0.0) || (u < 0.0 && v >= 0.0) || (u == 0.0 && v != 0.0);
    };
    std::optional<std::size_t> lo;
    std::optional<std::size_t> hi;
    for (std::size_t a = i; a-- > 0;) {
        if (sign_change(a)) {
            lo = a;
            break;
        }
    }
    for (std::size_t a = i; a + 1 < n; ++a) {
        if (sign_change(a)) {
            hi = a + 1;
            break;
        }
    }
    if (!lo || !hi) {
        throw ComputationError("local_fisher_length: no pair of nodes brackets the requested point");
    }
    const double h = psi.grid.h();
    const auto d = numerics::derivative_high_order(std::span<const Complex>(psi.values), h);
    std::vector<double> grad(n), dens(n);
    for (std::size_t k = 0; k < n; ++k) {
        grad[k] = std::norm(d[k]);
        dens[k] = std::norm(psi.values[k]);
    }
    const double g = numerics::trapezoid(grad, h, *lo, *hi);
    const double p = numerics::trapezoid(dens, h, *lo, *hi);
    if (!(g > 0.0) || !(p > 0.0)) {
        throw ComputationError("local_fisher_length: degenerate window");
    }
    return 1.0 / (2.0 * std::sqrt(g / p));
}

DispersionResult dispersion_checks(const DispersionParams& params, const Constants&)
{
    if (!std::isfinite(params.k) || !(params.m0 >= 0.0) || !(params.c > 0.0) || !(params.f > 0.0)) {
        throw PreconditionError("dispersion_checks: need finite k, m0 >= 0, c > 0, f > 0");
    }
    const double k = params.k;
    const double c = params.c;
    const double mu2 = params.m0 * params.m0 * c * c / (4.0 * params.f * params.f);
    DispersionResult out{};
    out.omega_kg = c * std::sqrt(k * k + mu2);

    // Sample points (x, t) at which exp(i(kx - wt)) is substituted.
    const double xs[] = {0.0, 0.37, -1.9, 4.2};
    const double ts[] = {0.0, 0.81, 2.3, -0.6};
    const Complex I(0.0, 1.0);
    double kg = 0.0;
    for (double x : xs) {
        for (double t : ts) {
            const Complex psi = std::exp(I * (k * x - out.omega_kg * t));
            const Complex psi_xx = (I * k) * (I * k) * psi;
            const Complex psi_tt = (-I * out.omega_kg) * (-I * out.omega_kg) * psi;
            const Complex a = -psi_xx;
            const Complex b = psi_tt / (c * c);
            const Complex m = mu2 * psi;
            const double scale = std::max({std::abs(a), std::abs(b), std::abs(m)});
            if (scale > 0.0) {
                kg = std::max(kg, std::abs(a + b + m) / scale);
            }
        }
    }
    out.kg_residual = kg;

    if (params.m0 > 0.0) {
        const double hbar = 2.0 * params.f;
        out.omega_nr = params.f * k * k / params.m0;
        double nr = 0.0;
        for (double x : xs) {
            for (double t : ts) {
                const Complex psi = std::exp(I * (k * x - out.omega_nr * t));
                const Complex lhs = I * hbar * (-I * out.omega_nr) * psi;
                const Complex rhs = -(hbar * hbar / (2.0 * params.m0)) * (I * k) * (I * k) * psi;
                const double scale = std::max(std::abs(lhs), std::abs(rhs));
                if (scale > 0.0) {
                    nr = std::max(nr, std::abs(lhs - rhs) / scale);
                }
            }
        }
        out.nr_residual = nr;
    } else {
        out.omega_nr = kNaN;
        out.nr_residual = kNaN;
    }
    return out;
}

double bohm_adiabaticity(const std::vector<double>& energies, double dV_dt, const Constants& consts)
{
    if (energies.size() < 2) {
        throw PreconditionError("bohm_adiabaticity: need at least two levels");
    }
    const double gap = energies[1] - energies[0];
    if (!(gap > 0.0)) {
        throw ComputationError("bohm_adiabaticity: degenerate lowest levels");
    }
    return consts.planck_h() / (gap * gap) * std::abs(dV_dt);
}

}  // namespace cpdq
