#include "cpdq/acceptance.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "cpdq/core.hpp"
#include "cpdq/dynamics.hpp"
#include "cpdq/info.hpp"
#include "cpdq/quantum.hpp"
#include "cpdq/thermo.hpp"
#include "cpdq/variational.hpp"

namespace cpdq::acceptance {

namespace {

constexpr double kLn2 = std::numbers::ln2;

std::size_t steps_for(double duration, double dt)
{
    return static_cast<std::size_t>(std::llround(duration / dt));
}

// m = omega = 1, q0 = 1, p0 = 0 (E = 1/2), ten periods.
TrajectoryRecord harmonic_record(const Constants& c)
{
    return integrate_hamilton(HarmonicPotential{1.0, 1.0}, 1.0, 0.0, {1e-3, steps_for(20.0 * kPi, 1e-3)}, c);
}

// First run of samples clear of the turning-point mask.
std::pair<std::size_t, std::size_t> first_clear_window(const Trajectory& traj)
{
    const auto mask = turning_point_mask(traj, kTurningMargin);
    std::size_t a = 0;
    while (a < mask.size() && mask[a]) {
        ++a;
    }
    std::size_t b = a;
    while (b + 1 < mask.size() && !mask[b + 1]) {
        ++b;
    }
    if (a >= mask.size() || b <= a) {
        throw ComputationError("no unmasked window");
    }
    return {a, b};
}

double max_unmasked_abs(const numerics::MaskedSeries& s, const std::vector<bool>& mask)
{
    double m = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.valid[i] && !mask[i]) {
            m = std::max(m, std::abs(s.values[i]));
        }
    }
    return m;
}

PistonRecord constant_speed_piston(double ratio, const Constants& c)
{
    PistonConfig cfg;
    cfg.wall_speed = ratio * cfg.v0;
    cfg.L_end = 2.0 * cfg.L0;
    return piston_simulate(cfg, c);
}

PistonRecord doubling_jump(const Constants& c)
{
    PistonConfig cfg;
    cfg.mode = PistonMode::sudden_jump;
    cfg.L_end = 2.0 * cfg.L0;
    return piston_simulate(cfg, c);
}

WaveFunction gaussian(const Grid1D& g, double sigma, double k)
{
    return WaveFunction::sample(g, [=](double x) {
        return std::exp(-x * x / (4.0 * sigma * sigma)) * std::exp(Complex(0.0, k * x));
    });
}

void criterion_dL(CheckList& out)
{
    const auto c = Constants::natural();
    const auto rec = harmonic_record(c);
    const double eps = default_epsilon(c);
    const double E = rec.energy_E.front();

    const auto dL = first_order_dL(rec.traj, special_variation(rec.traj, eps));
    out.at_most("max|dL| / (eps E), actual trajectory", "c1.dL_max", max_unmasked_abs(dL, turning_point_mask(rec.traj, kTurningMargin)) / (eps * E));

    const auto bent = perturb(rec.traj, 0.01, 3.0);
    const auto dLb = first_order_dL(bent, special_variation(bent, eps));
    out.at_least("max|dL| / (eps E), perturbed by 0.01 sin 3t", "c1.perturbed_min",
                 max_unmasked_abs(dLb, turning_point_mask(bent, kTurningMargin)) / (eps * E));
}

void criterion_action(CheckList& out)
{
    const auto c = Constants::natural();
    const double eps = default_epsilon(c);

    struct Fixture {
        std::string name;
        Trajectory traj;
        VariationSeries var;
        std::size_t i1, i2;
        double E;
        bool actual_special;
    };
    std::vector<Fixture> fx;

    const auto harm = harmonic_record(c);
    const auto [a, b] = first_clear_window(harm.traj);
    fx.push_back({"harmonic", harm.traj, special_variation(harm.traj, eps), a, b, harm.energy_E.front(), true});

    const auto bent = perturb(harm.traj, 0.01, 3.0);
    fx.push_back({"perturbed harmonic", bent, special_variation(bent, eps), a, b, harm.energy_E.front(), false});

    for (const auto& [name, pot] : std::vector<std::pair<std::string, Potential>>{
             {"linear", LinearPotential{1.0}}, {"free", FreePotential{}}, {"soft well", SoftWell{2.0, 1.0}}}) {
        const auto rec = integrate_hamilton(pot, 0.0, 1.0, {1e-3, 3000}, c);
        const auto [i1, i2] = first_clear_window(rec.traj);
        fx.push_back({name, rec.traj, special_variation(rec.traj, eps), i1, i2, rec.energy_E.front(), true});
    }

    std::vector<double> smooth(harm.traj.size());
    for (std::size_t i = 0; i < smooth.size(); ++i) {
        smooth[i] = eps * std::sin(0.7 * harm.traj.samples()[i].t);
    }
    fx.push_back({"harmonic, smooth custom variation", harm.traj, custom_variation(harm.traj, smooth), 0,
                  harm.traj.size() - 1, harm.energy_E.front(), false});

    for (const auto& f : fx) {
        const auto av = action_and_variation(f.traj, f.var, f.i1, f.i2);
        out.at_most("decomposition [" + f.name + "]", "c2.identity",
                    std::abs(av.dA_direct - av.dA_boundary - av.dA_bulk) / (std::abs(av.A) + eps));
        if (f.actual_special) {
            const double span = f.traj.samples()[f.i2].t - f.traj.samples()[f.i1].t;
            out.at_most("|dA_boundary| / eps [" + f.name + "]", "c2.boundary", std::abs(av.dA_boundary) / eps);
            out.at_most("|dA_bulk| / (eps |E| T) [" + f.name + "]", "c2.bulk",
                        std::abs(av.dA_bulk) / (eps * std::abs(f.E) * span));
        }
    }
}

void criterion_eigen(CheckList& out)
{
    const auto c = Constants::natural();
    const HarmonicPotential ho{1.0, 1.0};
    const auto sol = solve_tise(ho, Grid1D(-10.0, 10.0, 2000), 6, c);
    double worst = 0.0;
    for (std::size_t n = 0; n < 6; ++n) {
        const double exact = static_cast<double>(n) + 0.5;
        worst = std::max(worst, std::abs(sol.energies[n] - exact) / exact);
    }
    out.at_most("harmonic E_n, n <= 5, relative error", "c3.harmonic", worst);

    const double e1 = kPi * kPi / 2.0;
    const auto well = solve_tise(InfiniteWell{1.0}, Grid1D(0.0, 1.0, 2000), 1, c);
    out.at_most("infinite well E_1, relative error", "c3.well", std::abs(well.energies[0] - e1) / e1);

    const double coarse = std::abs(solve_tise(ho, Grid1D(-10.0, 10.0, 501), 1, c).energies[0] - 0.5);
    const double fine = std::abs(solve_tise(ho, Grid1D(-10.0, 10.0, 1001), 1, c).energies[0] - 0.5);
    out.at_least("error ratio under grid halving", "c3.order_min", coarse / fine);
    out.at_most("error ratio under grid halving", "c3.order_max", coarse / fine);
}

void criterion_fisher(CheckList& out)
{
    const auto c = Constants::natural();
    const Grid1D wide(-12.0, 12.0, 4001);
    const auto g = gaussian(wide, 1.0, 0.0);
    out.at_most("|sigma^2 FI - 1|, Gaussian", "c4.gaussian", std::abs(cr_bound_check(g, g.std_dev())));

    const double k = 2.0;
    const auto pw = WaveFunction::sample(Grid1D(0.0, 3.0 * kPi, 3001), [k](double x) { return std::exp(Complex(0.0, k * x)); });
    const auto fpw = fisher_metrics(pw);
    out.at_most("|fisher_length - 1/2k| * 2k, plane wave", "c4.plane_wave", std::abs(fpw.fisher_length * 2.0 * k - 1.0));

    std::vector<std::pair<std::string, WaveFunction>> fx;
    fx.emplace_back("gaussian", g);
    fx.emplace_back("plane wave", pw);
    fx.emplace_back("gaussian x plane wave", gaussian(wide, 1.0, 3.0));
    fx.emplace_back("double hump", WaveFunction::sample(wide, [](double x) {
                        return std::exp(-(x - 3.0) * (x - 3.0) / 2.0) + std::exp(-(x + 3.0) * (x + 3.0) / 2.0);
                    }));
    const auto ho = solve_tise(HarmonicPotential{1.0, 1.0}, Grid1D(-10.0, 10.0, 2000), 6, c);
    for (std::size_t n = 0; n < ho.states.size(); ++n) {
        fx.emplace_back("harmonic n=" + std::to_string(n), ho.states[n]);
    }
    const auto well = solve_tise(InfiniteWell{1.0}, Grid1D(0.0, 1.0, 2001), 4, c);
    for (std::size_t n = 0; n < well.states.size(); ++n) {
        fx.emplace_back("well n=" + std::to_string(n + 1), well.states[n]);
    }
    for (const auto& [name, psi] : fx) {
        const auto fm = fisher_metrics(psi);
        out.at_most("decomposition residual / FI [" + name + "]", "c4.decomposition",
                    fm.decomposition_residual / fm.fi_generalized);
    }
}

void criterion_variational(CheckList& out)
{
    const auto c = Constants::natural();
    const std::vector<std::pair<std::string, std::pair<Potential, Grid1D>>> fx = {
        {"harmonic", {HarmonicPotential{1.0, 1.0}, Grid1D(-10.0, 10.0, 2000)}},
        {"infinite well", {InfiniteWell{1.0}, Grid1D(0.0, 1.0, 2000)}},
    };
    for (const auto& [name, setup] : fx) {
        const auto& [pot, grid] = setup;
        const double exact = solve_tise(pot, grid, 1, c).energies[0];
        const auto v = variational_ground_state(pot, grid, c, 5000, 1e-12);
        out.at_most("relative difference to eigensolver [" + name + "]", "c5.agreement", std::abs(v.E - exact) / std::abs(exact));
        out.at_most("iterations [" + name + "]", "c5.iterations", static_cast<double>(v.iterations));
    }
}

void criterion_appendix(CheckList& out)
{
    const auto c = Constants::natural();
    out.at_most("max relative force residual [harmonic, E = 10]", "c6.residual",
                appendix_a_consistency(HarmonicPotential{1.0, 1.0}, 10.0, Grid1D(-6.0, 6.0, 12001), c).max_residual);
    out.at_most("max relative force residual [linear, E = 5]", "c6.residual",
                appendix_a_consistency(LinearPotential{1.0}, 5.0, Grid1D(-5.0, 10.0, 15001), c).max_residual);
}

void criterion_thermo(CheckList& out)
{
    const auto c = Constants::natural();
    const auto jump = doubling_jump(c);
    out.at_most("|dS/k - ln 2|, sudden doubling", "c7.jump_entropy",
                std::abs((jump.S.back() - jump.S.front()) / c.k_boltz - std::numbers::ln2));

    const auto slow = constant_speed_piston(1e-3, c);
    out.at_most("|d ln(pL)|, u/v = 1e-3 over a doubling", "c7.slow_adiabatic", std::abs(delta_ln_pL_at(slow, 2.0)));

    PistonConfig tmpl;
    tmpl.L_end = 2.0;
    const auto scan = adiabatic_scan({0.0, 1e-4, 1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.15, 0.2}, tmpl, c);
    out.holds("scan violations non-decreasing in u/v", "c7.monotone", scan.monotone);

    const auto fast = constant_speed_piston(0.3, c);
    for (const auto& [name, rec] : std::vector<std::pair<std::string, const PistonRecord*>>{
             {"sudden doubling", &jump}, {"u/v = 1e-3", &slow}, {"u/v = 0.3", &fast}}) {
        const auto hr = heat_theorem_residual(*rec, c);
        double worst = 0.0;
        for (double r : hr.log_residual) {
            worst = std::max(worst, std::abs(r));
        }
        out.at_most("max |log-form heat residual| [" + name + "]", "c7.log_residual", worst);
    }
}

void criterion_extended(CheckList& out)
{
    const auto c = Constants::natural();
    const auto jump = doubling_jump(c);
    const auto slow = constant_speed_piston(1e-3, c);
    const auto mid = constant_speed_piston(1e-2, c);
    for (const auto& [name, rec] : std::vector<std::pair<std::string, const PistonRecord*>>{
             {"sudden doubling", &jump}, {"u/v = 1e-3", &slow}, {"u/v = 1e-2", &mid}}) {
        const auto ts = extended_quantities(*rec, c);
        out.at_most("max rel |dL^e - (f/k) dS| per interval [" + name + "]", "c8.entropy_rate",
                    *std::max_element(ts.err_entropy.begin(), ts.err_entropy.end()));
        out.at_most("max rel |dL^e - df| per interval [" + name + "]", "c8.fdot",
                    *std::max_element(ts.err_fdot.begin(), ts.err_fdot.end()));
        out.at_most("rel |int dA/f - dS/k| [" + name + "]", "c8.action_entropy",
                    numerics::rel_diff(ts.action_over_f, ts.entropy_over_k));
    }
}

void criterion_pzie(CheckList& out)
{
    const auto c = Constants::natural();
    std::vector<std::pair<std::string, TrajectoryRecord>> fx;
    fx.emplace_back("harmonic", harmonic_record(c));
    fx.emplace_back("soft well", integrate_hamilton(SoftWell{2.0, 1.0}, 0.0, 1.0, {5e-4, 90000}, c));
    for (const auto& [name, rec] : fx) {
        const auto led = info_ledger(rec, c);
        double worst = 0.0;
        for (double v : led.I_cumulative) {
            worst = std::max(worst, std::abs(v));
        }
        out.at_most("max |cumulative I| in bits [" + name + "]", "c9.pzie", worst);
    }
    for (const auto& [name, rec] : std::vector<std::pair<std::string, PistonRecord>>{
             {"sudden doubling", doubling_jump(c)},
             {"u/v = 1e-3", constant_speed_piston(1e-3, c)},
             {"u/v = 0.3", constant_speed_piston(0.3, c)}}) {
        const auto led = info_ledger(rec, c);
        const double expected = -(rec.S.back() - rec.S.front()) / (c.k_boltz * kLn2);
        out.at_most("|ledger total + dS/(k ln 2)| in bits [" + name + "]", "c9.ledger_entropy",
                    std::abs(led.total() - expected));
    }
}

void criterion_bounds(CheckList& out)
{
    const auto si = Constants::si();
    const auto rb = rate_bounds(1.0, 300.0, si);
    out.at_most("|bound_h / 2.736e34 - 1|, E = 1 J", "c10.bound_h", std::abs(rb.bound_h / 2.736e34 - 1.0));
    out.at_most("|bound_f / bound_h - 1| at f = hbar/2", "c10.identity", std::abs(rb.bound_f / rb.bound_h - 1.0));
    out.at_most("|per_interval_cap - 1/(2 ln 2)|", "c10.per_interval_cap", std::abs(rb.per_interval_cap - 1.0 / (2.0 * kLn2)));
    bool ordered = true;
    for (double E : {1e-30, 1e-10, 1.0, 1e10}) {
        const auto r = rate_bounds(E, 300.0, si);
        ordered = ordered && r.bremermann < r.bound_h && r.bound_h < r.bekenstein;
    }
    out.holds("bremermann < bound_h < bekenstein", "c10.ordering", ordered);
}

void criterion_dispersion(CheckList& out)
{
    const auto c = Constants::natural();
    double worst = 0.0;
    for (const DispersionParams& p : {DispersionParams{0.0, 1.0, 1.0, 0.5}, DispersionParams{2.0, 1.0, 1.0, 0.5},
                                      DispersionParams{3.0, 0.0, 1.0, 0.5}, DispersionParams{1.5, 2.0, 10.0, 0.5}}) {
        const auto d = dispersion_checks(p, c);
        worst = std::max(worst, d.kg_residual);
        if (p.m0 > 0.0) {
            worst = std::max(worst, d.nr_residual);
        }
    }
    out.at_most("max plane-wave residual", "c11.residual", worst);

    const auto rest = dispersion_checks({0.0, 1.0, 1.0, 0.5}, c);
    out.at_most("|omega_kg(0) / (m0 c^2 / hbar) - 1|", "c11.rest_frequency", std::abs(rest.omega_kg / (1.0 / (2.0 * 0.5)) - 1.0));
    const auto light = dispersion_checks({3.0, 0.0, 2.0, 0.5}, c);
    out.at_most("|omega / (c k) - 1|, massless", "c11.light_cone", std::abs(light.omega_kg / 6.0 - 1.0));
    const auto nr = dispersion_checks({2.0, 1.0, 1.0, 0.5}, c);
    out.at_most("|omega_nr / (hbar k^2 / 2m) - 1|, k = 2", "c11.nr_frequency", std::abs(nr.omega_nr / 2.0 - 1.0));
}

std::vector<RegimeLabel> quadrant_labels()
{
    const auto c = Constants::natural();
    std::vector<RegimeLabel> labels;
    const auto hot = integrate_hamilton(HarmonicPotential{1.0, 1.0}, std::sqrt(2e4), 0.0, {1e-3, steps_for(4.0 * kPi, 1e-3)}, c);
    labels.push_back(regime_classify(regime_metrics(info_ledger(hot, c))).label);

    const SoftWell well{5.0, 1.0};
    const Grid1D g(-10.0, 10.0, 2001);
    const double E0 = solve_tise(well, g, 1, c).energies[0];
    labels.push_back(regime_classify(regime_metrics(local_wkb_profile(well, E0, g, c))).label);

    labels.push_back(regime_classify(regime_metrics(info_ledger(constant_speed_piston(3e-3, c), c))).label);
    labels.push_back(regime_classify(regime_metrics(info_ledger(constant_speed_piston(0.3, c), c))).label);
    return labels;
}

void criterion_regime(CheckList& out)
{
    const std::vector<RegimeLabel> expected = {
        RegimeLabel::classical_mechanics_or_adiabatic_eq,
        RegimeLabel::quantum_mechanics,
        RegimeLabel::nonadiabatic_equilibrium_td,
        RegimeLabel::nonadiabatic_nonequilibrium,
    };
    const auto first = quadrant_labels();
    const auto second = quadrant_labels();
    const std::vector<std::string> names = {"hot harmonic trajectory", "soft-well ground state", "slow piston",
                                            "fast piston"};
    for (std::size_t i = 0; i < expected.size(); ++i) {
        out.holds(names[i] + " -> " + regime_label_name(expected[i]), "c12.labels", first[i] == expected[i]);
    }
    out.holds("labels identical on a second evaluation", "c12.deterministic", first == second);
}

}  // namespace

bool CriterionResult::pass() const
{
    return error.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* CriterionResult::first_failure() const
{
    for (const auto& c : checks) {
        if (!c.pass) {
            return &c;
        }
    }
    return nullptr;
}

double CheckList::tolerance(const std::string& key) const
{
    const auto it = tol_.find(key);
    if (it == tol_.end()) {
        throw std::logic_error("acceptance: no tolerance named " + key);
    }
    return it->second;
}

void CheckList::at_most(const std::string& name, const std::string& key, double value)
{
    const double t = tolerance(key);
    checks_.push_back({name, key, value, t, Relation::at_most, value <= t});
}

void CheckList::at_least(const std::string& name, const std::string& key, double value)
{
    const double t = tolerance(key);
    checks_.push_back({name, key, value, t, Relation::at_least, value >= t});
}

void CheckList::holds(const std::string& name, const std::string& key, bool condition)
{
    at_least(name, key, condition ? 1.0 : 0.0);
}

Tolerances default_tolerances()
{
    return {
        {"c1.dL_max", 1e-4},
        {"c1.perturbed_min", 1e-2},
        {"c2.identity", 1e-8},
        {"c2.boundary", 1e-12},
        {"c2.bulk", 1e-4},
        {"c3.harmonic", 1e-3},
        {"c3.well", 1e-3},
        {"c3.order_min", 3.5},
        {"c3.order_max", 4.5},
        {"c4.gaussian", 1e-6},
        {"c4.plane_wave", 1e-8},
        {"c4.decomposition", 1e-8},
        {"c5.agreement", 1e-4},
        {"c5.iterations", 5000.0},
        {"c6.residual", 1e-3},
        {"c7.jump_entropy", 1e-9},
        {"c7.slow_adiabatic", 5e-3},
        {"c7.monotone", 1.0},
        {"c7.log_residual", 1e-12},
        {"c8.entropy_rate", 1e-2},
        {"c8.fdot", 1e-2},
        {"c8.action_entropy", 1e-2},
        {"c9.pzie", 1e-6},
        {"c9.ledger_entropy", 1e-3},
        {"c10.bound_h", 1e-4},
        {"c10.identity", 1e-12},
        {"c10.per_interval_cap", 0.0},
        {"c10.ordering", 1.0},
        {"c11.residual", 1e-12},
        {"c11.rest_frequency", 1e-12},
        {"c11.light_cone", 1e-12},
        {"c11.nr_frequency", 1e-12},
        {"c12.labels", 1.0},
        {"c12.deterministic", 1.0},
    };
}

void apply_override(Tolerances& tol, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw std::invalid_argument("tolerance override must look like NAME=VALUE: " + assignment);
    }
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    if (tol.find(key) == tol.end()) {
        throw std::invalid_argument("unknown tolerance: " + key);
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw std::invalid_argument("bad tolerance value for " + key + ": " + text);
    }
    tol[key] = v;
}

const std::vector<Criterion>& criteria()
{
    static const std::vector<Criterion> all = {
        {1, "first-order dL vanishes on actual trajectories", {"variational", "dynamics"}, 1.0, criterion_dL},
        {2, "action variation splits into boundary and bulk terms", {"variational", "dynamics"}, std::nullopt, criterion_action},
        {3, "eigensolver energies and convergence order", {"quantum"}, 10.0, criterion_eigen},
        {4, "Cramer-Rao margins and Fisher decomposition", {"quantum"}, std::nullopt, criterion_fisher},
        {5, "variational ground state matches the eigensolver", {"quantum"}, std::nullopt, criterion_variational},
        {6, "force recovered from delta_x(x)", {"quantum"}, std::nullopt, criterion_appendix},
        {7, "piston thermodynamics and adiabatic scan", {"thermo"}, std::nullopt, criterion_thermo},
        {8, "extended Lagrangian and action-entropy relation", {"thermo"}, std::nullopt, criterion_extended},
        {9, "zero information exchange and piston ledger", {"info", "dynamics", "thermo"}, std::nullopt, criterion_pzie},
        {10, "information-rate bounds", {"info"}, std::nullopt, criterion_bounds},
        {11, "plane-wave dispersion", {"quantum"}, std::nullopt, criterion_dispersion},
        {12, "regime classifier quadrants", {"info", "quantum", "thermo"}, std::nullopt, criterion_regime},
    };
    return all;
}

bool matches_filter(const Criterion& c, const std::string& filter)
{
    if (filter.empty() || filter == "c" + std::to_string(c.id)) {
        return true;
    }
    return std::find(c.tags.begin(), c.tags.end(), filter) != c.tags.end();
}

CriterionResult run_criterion(const Criterion& c, const Tolerances& tol)
{
    CriterionResult r;
    r.id = c.id;
    r.name = c.name;
    r.tags = c.tags;
    r.runtime_limit = c.runtime_limit;
    CheckList list(tol);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        c.run(list);
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.checks = list.take();
    return r;
}

std::vector<CriterionResult> run_suite(const std::string& filter, const Tolerances& tol, std::size_t threads)
{
    std::vector<const Criterion*> todo;
    for (const auto& c : criteria()) {
        if (matches_filter(c, filter)) {
            todo.push_back(&c);
        }
    }
    std::vector<CriterionResult> results(todo.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < todo.size(); i = next++) {
            results[i] = run_criterion(*todo[i], tol);
        }
    };
    const std::size_t n = std::max<std::size_t>(1, std::min(threads, todo.size()));
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < n; ++i) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
    return results;
}

std::size_t thread_cap()
{
    if (const char* env = std::getenv("CPDQ_LAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) {
            return static_cast<std::size_t>(v);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string relation_symbol(Relation r)
{
    return r == Relation::at_most ? "<=" : ">=";
}

}  // namespace cpdq::acceptance
