#include "cpdq/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "cpdq/dynamics.hpp"
#include "cpdq/info.hpp"
#include "cpdq/quantum.hpp"
#include "cpdq/thermo.hpp"
#include "cpdq/variational.hpp"

namespace cpdq::scenario {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Schema tables

enum class Type { number, integer, string, object, number_array };
enum class Bound { any, positive, non_negative };

struct Field {
    std::string key;
    Type type;
    bool required;
    std::string doc;
    Bound bound = Bound::any;
    std::optional<double> minimum;
    std::vector<std::string> choices;
    std::vector<Field> fields;
};

Field number(std::string key, std::string doc, bool required = false, Bound bound = Bound::any)
{
    return {std::move(key), Type::number, required, std::move(doc), bound, std::nullopt, {}, {}};
}

Field integer(std::string key, std::string doc, bool required, double minimum)
{
    return {std::move(key), Type::integer, required, std::move(doc), Bound::non_negative, minimum, {}, {}};
}

Field text(std::string key, std::string doc, std::vector<std::string> choices = {}, bool required = false)
{
    return {std::move(key), Type::string, required, std::move(doc), Bound::any, std::nullopt, std::move(choices), {}};
}

Field object(std::string key, std::string doc, std::vector<Field> fields, bool required = false)
{
    return {std::move(key), Type::object, required, std::move(doc), Bound::any, std::nullopt, {}, std::move(fields)};
}

Field number_array(std::string key, std::string doc, bool required = false, Bound bound = Bound::any)
{
    return {std::move(key), Type::number_array, required, std::move(doc), bound, std::nullopt, {}, {}};
}

// Keys each potential type takes (all required).
const std::map<std::string, std::vector<std::string>>& potential_variants()
{
    static const std::map<std::string, std::vector<std::string>> v = {
        {"free", {}},
        {"linear", {"F0"}},
        {"harmonic", {"m", "omega"}},
        {"infinite_well", {"L"}},
        {"soft_well", {"V0", "a"}},
    };
    return v;
}

Field potential_field()
{
    return object("potential", "one-dimensional potential; the keys besides \"type\" depend on the type",
                  {
                      text("type", "potential family", {"free", "linear", "harmonic", "infinite_well", "soft_well"}, true),
                      number("F0", "linear: constant force, V = -F0 q"),
                      number("m", "harmonic: mass in V = m w^2 q^2 / 2", false, Bound::positive),
                      number("omega", "harmonic: angular frequency", false, Bound::positive),
                      number("L", "infinite_well: width of [0, L]", false, Bound::positive),
                      number("V0", "soft_well: depth in V = -V0 sech^2(q / a)"),
                      number("a", "soft_well: width", false, Bound::positive),
                  },
                  true);
}

Field grid_field()
{
    return object("grid", "uniform grid including both end points",
                  {
                      number("x_min", "left end", true),
                      number("x_max", "right end", true),
                      integer("n", "number of points", true, 64),
                  },
                  true);
}

struct KindSpec {
    std::string name;
    std::string doc;
    std::vector<Field> params;
    acceptance::Tolerances tolerances;
};

const std::vector<KindSpec>& kinds()
{
    static const std::vector<KindSpec> all = {
        {"trajectory",
         "integrates Hamilton's equations and checks the uncertainty band, energy and information ledgers",
         {potential_field(), number("q0", "initial position", true), number("p0", "initial momentum", true),
          number("dt", "time step (default 1e-3)", false, Bound::positive),
          integer("n_steps", "number of steps", true, 4),
          number("epsilon", "special-variation amplitude (default 1e-6 f)", false, Bound::positive),
          number("turning_margin", "turning-point mask margin as a fraction of max|p| (default 0.3)", false,
                 Bound::non_negative)},
         {{"cpdq_drift", 1e-12}, {"energy_drift", 1e-5}, {"pzie", 1e-6}, {"dL_max", 1e-4}}},
        {"piston",
         "particle between a fixed wall and a moving one; or, with \"scan\", a sweep of wall speeds",
         {number("L0", "initial width (default 1)", false, Bound::positive),
          number("v0", "initial particle speed (default 1)", false, Bound::positive),
          number("mass", "particle mass (default 1)", false, Bound::positive),
          number("wall_speed", "wall speed u, positive expands (default 0)"),
          number("t_end", "stop time", false, Bound::positive), number("L_end", "stop width", false, Bound::positive),
          text("mode", "wall motion (default constant_speed)", {"constant_speed", "sudden_jump"}),
          integer("settle_bounces", "moving-wall hits kept after a sudden jump (default 2)", false, 1),
          object("scan", "adiabaticity sweep over u/v from L0 to L_end (default 2 L0)",
                 {number_array("ratios", "u/v values in [0, 1)", true, Bound::non_negative),
                  number("threshold", "violation threshold (default 1e-2)", false, Bound::positive)})},
         {{"log_residual", 1e-12},
          {"ledger_entropy", 1e-3},
          {"entropy_rate", 1e-2},
          {"fdot", 1e-2},
          {"action_entropy", 1e-2},
          {"monotone", 1.0}}},
        {"tise",
         "lowest eigenpairs of the finite-difference Hamiltonian",
         {potential_field(), grid_field(), integer("n_states", "number of states", true, 1),
          number_array("expected_energies", "oracle energies to compare against"),
          number("dV_dt", "rate of change of V for the level-spacing adiabaticity report")},
         {{"orthonormality", 1e-8}, {"energies", 1e-3}}},
        {"variational",
         "ground state by minimizing the energy functional",
         {potential_field(), grid_field(), integer("max_iters", "iteration cap (default 5000)", false, 1),
          number("tol", "relative energy change for convergence (default 1e-12)", false, Bound::positive)},
         {{"agreement", 1e-4}}},
        {"wkb",
         "local plane-wave profile, force recovery and regime metrics at energy E",
         {potential_field(), grid_field(), number("E", "energy", true)},
         {{"force_residual", 1e-3}}},
        {"dispersion",
         "plane-wave substitution into the relativistic and non-relativistic wave equations",
         {number("k", "wavenumber", true), number("m0", "rest mass", true, Bound::non_negative),
          number("c", "speed of light (default from constants)", false, Bound::positive),
          number("f", "action constant (default from constants)", false, Bound::positive)},
         {{"residual", 1e-12}}},
        {"bounds",
         "information-rate bounds and comparators",
         {number("E", "energy", true, Bound::positive), number("theta", "temperature", true, Bound::positive)},
         {{"identity", 1e-12}, {"per_interval_cap", 0.0}, {"ordering", 1.0}}},
        {"regime",
         "classifies three information metrics into one of four regimes",
         {number("mean_abs_dI", "bits", true, Bound::non_negative),
          number("max_step_dI_q", "bits", true, Bound::non_negative),
          number("max_step_dI_p", "bits", true, Bound::non_negative),
          number("tol_zero", "bits (default 1e-6)", false, Bound::positive),
          number("tol_small", "bits (default 0.1)", false, Bound::positive),
          text("expected_label", "label the check compares against",
               {"classical_mechanics_or_adiabatic_eq", "quantum_mechanics", "nonadiabatic_equilibrium_td",
                "nonadiabatic_nonequilibrium"})},
         {{"label", 1.0}}},
        {"suite",
         "runs the acceptance criteria",
         {text("filter", "tag or criterion id (c1..c12); empty runs all")},
         acceptance::default_tolerances()},
    };
    return all;
}

const KindSpec& kind_spec(const std::string& name)
{
    for (const auto& k : kinds()) {
        if (k.name == name) {
            return k;
        }
    }
    throw ConfigError("unknown kind '" + name + "'");
}

std::vector<Field> top_level_fields()
{
    std::vector<std::string> names;
    for (const auto& k : kinds()) {
        names.push_back(k.name);
    }
    return {
        text("kind", "pipeline to run", names, true),
        text("units", "unit system (default natural)", {"natural", "si"}),
        object("constants", "overrides of the unit system's constants",
               {number("f", "action per uncertainty interval", false, Bound::positive),
                number("hbar", "reduced Planck constant", false, Bound::positive),
                number("k_boltz", "Boltzmann constant", false, Bound::positive),
                number("mass", "particle mass", false, Bound::positive),
                number("c", "speed of light", false, Bound::positive),
                number("f_ref", "entropy reference action", false, Bound::positive),
                number("p_floor", "momentum below which delta_q is undefined", false, Bound::positive)}),
        text("output_dir", "directory for report.json and CSV series"),
        object("params", "kind-specific parameters", {}),
        object("tolerances", "kind-specific check tolerances", {}),
    };
}

std::string type_name(Type t)
{
    switch (t) {
    case Type::number:
        return "number";
    case Type::integer:
        return "integer";
    case Type::string:
        return "string";
    case Type::object:
        return "object";
    case Type::number_array:
        return "array of numbers";
    }
    return "?";
}

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

void check_bound(double v, const Field& f, const std::string& where)
{
    if (!std::isfinite(v)) {
        throw ConfigError("key '" + where + "' must be finite");
    }
    if (f.bound == Bound::positive && !(v > 0.0)) {
        throw ConfigError("key '" + where + "' must be positive");
    }
    if (f.bound == Bound::non_negative && !(v >= 0.0)) {
        throw ConfigError("key '" + where + "' must be non-negative");
    }
    if (f.minimum && v < *f.minimum) {
        std::ostringstream msg;
        msg << "key '" << where << "' must be at least " << *f.minimum;
        throw ConfigError(msg.str());
    }
}

void validate_object(const json& j, const std::vector<Field>& fields, const std::string& path);

void validate_value(const json& v, const Field& f, const std::string& where)
{
    switch (f.type) {
    case Type::number:
        if (!v.is_number()) {
            throw ConfigError("key '" + where + "' must be a number");
        }
        check_bound(v.get<double>(), f, where);
        break;
    case Type::integer:
        if (!v.is_number_integer()) {
            throw ConfigError("key '" + where + "' must be an integer");
        }
        check_bound(v.get<double>(), f, where);
        break;
    case Type::string:
        if (!v.is_string()) {
            throw ConfigError("key '" + where + "' must be a string");
        }
        if (!f.choices.empty() &&
            std::find(f.choices.begin(), f.choices.end(), v.get<std::string>()) == f.choices.end()) {
            throw ConfigError("key '" + where + "' has unsupported value '" + v.get<std::string>() + "'");
        }
        break;
    case Type::number_array:
        if (!v.is_array() || v.empty()) {
            throw ConfigError("key '" + where + "' must be a non-empty array of numbers");
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string at = where + "[" + std::to_string(i) + "]";
            if (!v[i].is_number()) {
                throw ConfigError("key '" + at + "' must be a number");
            }
            check_bound(v[i].get<double>(), f, at);
        }
        break;
    case Type::object:
        if (!v.is_object()) {
            throw ConfigError("key '" + where + "' must be an object");
        }
        // Field-less objects (params, tolerances) are checked against the kind's tables later.
        if (!f.fields.empty()) {
            validate_object(v, f.fields, where);
        }
        if (f.key == "potential") {
            const auto& allowed = potential_variants().at(v.at("type").get<std::string>());
            for (const auto& [k, _] : v.items()) {
                if (k != "type" && std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
                    throw ConfigError("unknown key '" + join(where, k) + "' for potential type '" +
                                      v.at("type").get<std::string>() + "'");
                }
            }
            for (const auto& k : allowed) {
                if (!v.contains(k)) {
                    throw ConfigError("missing required key '" + join(where, k) + "'");
                }
            }
        }
        break;
    }
}

void validate_object(const json& j, const std::vector<Field>& fields, const std::string& path)
{
    for (const auto& [key, value] : j.items()) {
        const auto it = std::find_if(fields.begin(), fields.end(), [&](const Field& f) { return f.key == key; });
        if (it == fields.end()) {
            throw ConfigError("unknown key '" + join(path, key) + "'");
        }
        validate_value(value, *it, join(path, key));
    }
    for (const auto& f : fields) {
        if (f.required && !j.contains(f.key)) {
            throw ConfigError("missing required key '" + join(path, f.key) + "'");
        }
    }
}

json field_schema(const Field& f)
{
    json j = {{"key", f.key}, {"type", type_name(f.type)}, {"required", f.required}, {"doc", f.doc}};
    if (f.bound == Bound::positive) {
        j["constraint"] = "> 0";
    } else if (f.bound == Bound::non_negative && f.type != Type::integer) {
        j["constraint"] = ">= 0";
    }
    if (f.minimum) {
        j["minimum"] = *f.minimum;
    }
    if (!f.choices.empty()) {
        j["choices"] = f.choices;
    }
    if (!f.fields.empty()) {
        json children = json::array();
        for (const auto& c : f.fields) {
            children.push_back(field_schema(c));
        }
        j["fields"] = children;
    }
    if (f.key == "potential") {
        j["variants"] = potential_variants();
    }
    return j;
}

// ---------------------------------------------------------------------------
// Config access

double get_or(const json& j, const char* key, double fallback)
{
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

Constants resolve_constants(const json& cfg)
{
    const auto units = cfg.value("units", std::string("natural")) == "si" ? UnitSystem::si : UnitSystem::natural;
    Constants c = Constants::for_units(units);
    if (cfg.contains("constants")) {
        const auto& o = cfg.at("constants");
        c.f = get_or(o, "f", c.f);
        c.hbar = get_or(o, "hbar", c.hbar);
        c.k_boltz = get_or(o, "k_boltz", c.k_boltz);
        c.mass = get_or(o, "mass", c.mass);
        c.c = get_or(o, "c", c.c);
        c.f_ref = get_or(o, "f_ref", c.f_ref);
        c.p_floor = get_or(o, "p_floor", c.p_floor);
    }
    c.validate();
    return c;
}

json constants_json(const Constants& c)
{
    return {{"f", c.f},     {"hbar", c.hbar}, {"k_boltz", c.k_boltz}, {"mass", c.mass},
            {"c", c.c},     {"f_ref", c.f_ref}, {"p_floor", c.p_floor}, {"h", c.planck_h()}};
}

Potential parse_potential(const json& j)
{
    const auto type = j.at("type").get<std::string>();
    if (type == "free") {
        return FreePotential{};
    }
    if (type == "linear") {
        return LinearPotential{j.at("F0").get<double>()};
    }
    if (type == "harmonic") {
        return HarmonicPotential{j.at("m").get<double>(), j.at("omega").get<double>()};
    }
    if (type == "infinite_well") {
        return InfiniteWell{j.at("L").get<double>()};
    }
    return SoftWell{j.at("V0").get<double>(), j.at("a").get<double>()};
}

Grid1D parse_grid(const json& j)
{
    const double lo = j.at("x_min").get<double>();
    const double hi = j.at("x_max").get<double>();
    if (!(hi > lo)) {
        throw ConfigError("key 'params.grid.x_max' must exceed 'params.grid.x_min'");
    }
    return Grid1D(lo, hi, j.at("n").get<std::size_t>());
}

// ---------------------------------------------------------------------------
// Output helpers

struct Context {
    fs::path out;
    std::vector<std::string> artifacts;

    void csv(const std::string& name, const std::vector<std::string>& header, const std::vector<std::vector<double>>& cols)
    {
        write_csv(out / name, header, cols);
        artifacts.push_back(name);
    }
};

json checks_json(const std::vector<acceptance::Check>& checks)
{
    json arr = json::array();
    for (const auto& c : checks) {
        arr.push_back({{"name", c.name},
                       {"tolerance_key", c.tolerance_key},
                       {"value", c.value},
                       {"relation", acceptance::relation_symbol(c.relation)},
                       {"tolerance", c.tolerance},
                       {"pass", c.pass}});
    }
    return arr;
}

json metrics_json(const RegimeReport& r)
{
    return {{"mean_abs_dI", r.metrics.mean_abs_dI},
            {"max_step_dI_q", r.metrics.max_step_dI_q},
            {"max_step_dI_p", r.metrics.max_step_dI_p},
            {"tol_zero", r.thresholds.tol_zero},
            {"tol_small", r.thresholds.tol_small},
            {"label", regime_label_name(r.label)}};
}

std::vector<double> bool_column(const std::vector<bool>& v)
{
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = v[i] ? 1.0 : 0.0;
    }
    return out;
}

void write_wave(Context& ctx, const std::string& name, const WaveFunction& psi)
{
    const std::size_t n = psi.values.size();
    std::vector<double> re(n), im(n);
    for (std::size_t i = 0; i < n; ++i) {
        re[i] = psi.values[i].real();
        im[i] = psi.values[i].imag();
    }
    ctx.csv(name, {"x", "re_psi", "im_psi", "P"}, {psi.grid.points(), re, im, psi.probability()});
}

// ---------------------------------------------------------------------------
// Pipelines

json run_trajectory(const json& p, const Constants& c, acceptance::CheckList& checks, Context& ctx)
{
    const auto pot = parse_potential(p.at("potential"));
    IntegratorConfig ic;
    ic.dt = get_or(p, "dt", 1e-3);
    ic.n_steps = p.at("n_steps").get<std::size_t>();
    const auto rec = integrate_hamilton(pot, p.at("q0").get<double>(), p.at("p0").get<double>(), ic, c);
    const auto budget = energy_budget(rec);
    const auto diag = cpdq_diagnostics(rec, c);
    const auto led = info_ledger(rec, c);
    double max_I = 0.0;
    for (double v : led.I_cumulative) {
        max_I = std::max(max_I, std::abs(v));
    }
    const auto regime = regime_classify(regime_metrics(led));

    const double eps = get_or(p, "epsilon", default_epsilon(c));
    const double margin = get_or(p, "turning_margin", kTurningMargin);
    const auto dL = first_order_dL(rec.traj, special_variation(rec.traj, eps));
    const auto mask = turning_point_mask(rec.traj, margin);
    double max_dL = 0.0;
    for (std::size_t i = 0; i < dL.size(); ++i) {
        if (dL.valid[i] && !mask[i]) {
            max_dL = std::max(max_dL, std::abs(dL.values[i]));
        }
    }
    const double E0 = rec.energy_E.front();

    checks.at_most("max relative drift of p delta_q", "cpdq_drift", diag.max_rel_drift);
    checks.at_most("max energy drift", "energy_drift", budget.max_E_drift);
    checks.at_most("max |cumulative information| in bits", "pzie", max_I);
    if (E0 != 0.0) {
        checks.at_most("max |first-order dL| / (eps |E|) off the turning points", "dL_max", max_dL / (eps * std::abs(E0)));
    }

    ctx.csv("trajectory.csv", {"t", "q", "p", "T", "V", "E", "delta_q", "f"},
            {rec.traj.times(), rec.traj.positions(), rec.traj.momenta(), rec.energy_T, rec.energy_V, rec.energy_E,
             rec.delta_q_series, rec.f_series});
    std::vector<double> t_step(led.dI_q.size());
    for (std::size_t i = 0; i < t_step.size(); ++i) {
        t_step[i] = rec.traj.samples()[i + 1].t;
    }
    ctx.csv("ledger.csv", {"t", "dI_q", "dI_p", "I_cumulative", "valid"},
            {t_step, led.dI_q, led.dI_p, led.I_cumulative, bool_column(led.valid)});

    return {{"potential", potential_name(pot)},
            {"E0", E0},
            {"max_E_drift", budget.max_E_drift},
            {"cpdq_max_rel_drift", diag.max_rel_drift},
            {"gap_samples", diag.masked},
            {"information_total_bits", led.total()},
            {"information_max_abs_bits", max_I},
            {"epsilon", eps},
            {"max_abs_first_order_dL", max_dL},
            {"regime", metrics_json(regime)}};
}

json run_piston(const json& p, const Constants& c, acceptance::CheckList& checks, Context& ctx)
{
    PistonConfig cfg;
    cfg.L0 = get_or(p, "L0", cfg.L0);
    cfg.v0 = get_or(p, "v0", cfg.v0);
    cfg.mass = get_or(p, "mass", cfg.mass);
    cfg.wall_speed = get_or(p, "wall_speed", 0.0);
    if (p.contains("t_end")) {
        cfg.t_end = p.at("t_end").get<double>();
    }
    if (p.contains("L_end")) {
        cfg.L_end = p.at("L_end").get<double>();
    }
    if (p.value("mode", std::string("constant_speed")) == "sudden_jump") {
        cfg.mode = PistonMode::sudden_jump;
    }
    if (p.contains("settle_bounces")) {
        cfg.settle_bounces = p.at("settle_bounces").get<std::size_t>();
    }

    if (p.contains("scan")) {
        const auto& s = p.at("scan");
        const auto ratios = s.at("ratios").get<std::vector<double>>();
        for (double r : ratios) {
            if (!(r < 1.0)) {
                throw ConfigError("key 'params.scan.ratios' values must lie in [0, 1)");
            }
        }
        const double threshold = get_or(s, "threshold", 1e-2);
        const auto scan = adiabatic_scan(ratios, cfg, c, threshold);
        std::vector<double> r, d, ds;
        json rows = json::array();
        for (const auto& row : scan.rows) {
            r.push_back(row.ratio);
            d.push_back(row.delta_ln_pL);
            ds.push_back(row.delta_S_over_k);
            rows.push_back({{"ratio", row.ratio}, {"delta_ln_pL", row.delta_ln_pL}, {"delta_S_over_k", row.delta_S_over_k}});
        }
        ctx.csv("scan.csv", {"ratio", "delta_ln_pL", "delta_S_over_k"}, {r, d, ds});
        checks.holds("violations non-decreasing in u/v", "monotone", scan.monotone);
        json out = {{"rows", rows}, {"threshold", threshold}, {"monotone", scan.monotone}};
        out["largest_ratio_below_threshold"] = scan.largest_ratio_below ? json(*scan.largest_ratio_below) : json(nullptr);
        return out;
    }

    const auto rec = piston_simulate(cfg, c);
    if (rec.points() < 2) {
        throw ComputationError("piston: the run produced fewer than 2 record points");
    }
    const auto heat = heat_theorem_residual(rec, c);
    double worst_log = 0.0;
    double worst_heat = 0.0;
    for (std::size_t i = 0; i < heat.log_residual.size(); ++i) {
        worst_log = std::max(worst_log, std::abs(heat.log_residual[i]));
        worst_heat = std::max(worst_heat, std::abs(heat.residual[i]));
    }
    checks.at_most("max |log-form heat residual|", "log_residual", worst_log);

    const auto led = info_ledger(rec, c);
    const double dS_over_k = (rec.S.back() - rec.S.front()) / c.k_boltz;
    checks.at_most("|ledger total + dS/(k ln 2)| in bits", "ledger_entropy",
                   std::abs(led.total() + dS_over_k / std::log(2.0)));

    json out = {{"record_points", rec.points()},
                {"events", rec.events.size()},
                {"delta_S_over_k", dS_over_k},
                {"delta_ln_pL", std::log(rec.f.back() / rec.f.front())},
                {"max_abs_heat_residual", worst_heat},
                {"max_abs_log_heat_residual", worst_log},
                {"information_total_bits", led.total()},
                {"regime", metrics_json(regime_classify(regime_metrics(led)))}};

    ctx.csv("piston.csv", {"t", "L", "p", "f", "S", "theta", "P"}, {rec.t, rec.L, rec.p, rec.f, rec.S, rec.theta, rec.P});
    if (rec.points() >= 3) {
        const auto ts = extended_quantities(rec, c);
        checks.at_most("max rel |dL^e - (f/k) dS| per interval", "entropy_rate",
                       *std::max_element(ts.err_entropy.begin(), ts.err_entropy.end()));
        checks.at_most("max rel |dL^e - df| per interval", "fdot", *std::max_element(ts.err_fdot.begin(), ts.err_fdot.end()));
        checks.at_most("rel |int dA/f - dS/k|", "action_entropy", numerics::rel_diff(ts.action_over_f, ts.entropy_over_k));
        out["action_over_f"] = ts.action_over_f;
        out["entropy_over_k"] = ts.entropy_over_k;
        ctx.csv("intervals.csv",
                {"dt", "dE", "dS", "dVol", "theta", "P", "dA_ext", "df", "f_dS_over_k", "L_ext_rate", "f_rate",
                 "fS_rate", "dI_q", "dI_p"},
                {ts.dt, ts.dE, ts.dS, ts.dVol, ts.theta, ts.P, ts.dA_ext, ts.df, ts.f_dS_over_k, ts.L_ext_rate,
                 ts.f_rate, ts.fS_rate, led.dI_q, led.dI_p});
    }
    return out;
}

json run_tise(const json& p, const Constants& c, acceptance::CheckList& checks, Context& ctx)
{
    const auto pot = parse_potential(p.at("potential"));
    const auto grid = parse_grid(p.at("grid"));
    const auto n_states = p.at("n_states").get<std::size_t>();
    const auto sol = solve_tise(pot, grid, n_states, c);

    double ortho = 0.0;
    for (std::size_t a = 0; a < n_states; ++a) {
        for (std::size_t b = a; b < n_states; ++b) {
            std::vector<double> prod(grid.n);
            for (std::size_t i = 0; i < grid.n; ++i) {
                prod[i] = (std::conj(sol.states[a].values[i]) * sol.states[b].values[i]).real();
            }
            const double overlap = numerics::trapezoid(prod, grid.h());
            ortho = std::max(ortho, std::abs(overlap - (a == b ? 1.0 : 0.0)));
        }
    }
    checks.at_most("max |<psi_a|psi_b> - delta_ab|", "orthonormality", ortho);

    json states = json::array();
    for (std::size_t s = 0; s < n_states; ++s) {
        const auto fm = fisher_metrics(sol.states[s]);
        states.push_back({{"n", s},
                          {"E", sol.energies[s]},
                          {"fi_classical", fm.fi_classical},
                          {"fi_generalized", fm.fi_generalized},
                          {"fisher_length", fm.fisher_length},
                          {"decomposition_residual", fm.decomposition_residual},
                          {"std_dev", sol.states[s].std_dev()}});
        write_wave(ctx, "state_" + std::to_string(s) + ".csv", sol.states[s]);
    }
    json out = {{"potential", potential_name(pot)}, {"states", states}, {"warnings", sol.warnings}};

    if (p.contains("expected_energies")) {
        const auto expected = p.at("expected_energies").get<std::vector<double>>();
        if (expected.size() > n_states) {
            throw ConfigError("key 'params.expected_energies' lists more energies than n_states");
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            worst = std::max(worst, std::abs(sol.energies[i] - expected[i]) / std::abs(expected[i]));
        }
        checks.at_most("max relative energy error against expected_energies", "energies", worst);
    }
    if (p.contains("dV_dt")) {
        out["bohm_adiabaticity"] = bohm_adiabaticity(sol.energies, p.at("dV_dt").get<double>(), c);
    }
    return out;
}

json run_variational(const json& p, const Constants& c, acceptance::CheckList& checks, Context& ctx)
{
    const auto pot = parse_potential(p.at("potential"));
    const auto grid = parse_grid(p.at("grid"));
    const std::size_t max_iters = p.contains("max_iters") ? p.at("max_iters").get<std::size_t>() : 5000;
    const double tol = get_or(p, "tol", 1e-12);
    const auto v = variational_ground_state(pot, grid, c, max_iters, tol);
    const double exact = solve_tise(pot, grid, 1, c).energies[0];
    checks.at_most("relative difference to the eigensolver ground energy", "agreement",
                   std::abs(v.E - exact) / std::max(std::abs(exact), 1e-300));
    write_wave(ctx, "ground_state.csv", v.psi);
    return {{"potential", potential_name(pot)}, {"E", v.E}, {"E_eigensolver", exact}, {"iterations", v.iterations}};
}

json run_wkb(const json& p, const Constants& c, acceptance::CheckList& checks, Context& ctx)
{
    const auto pot = parse_potential(p.at("potential"));
    const auto grid = parse_grid(p.at("grid"));
    const double E = p.at("E").get<double>();
    const auto prof = local_wkb_profile(pot, E, grid, c);
    const auto regime = regime_classify(regime_metrics(prof));
    json out = {{"potential", potential_name(pot)}, {"E", E}, {"regime", metrics_json(regime)}};
    std::vector<double> force(grid.n, std::numeric_limits<double>::quiet_NaN());
    if (E > 0.0) {
        const auto aa = appendix_a_consistency(pot, E, grid, c);
        checks.at_most("max |recovered force + V'| / max |V'|", "force_residual", aa.max_residual);
        out["force_residual"] = aa.max_residual;
        out["admitted_points"] = aa.admitted;
        force = aa.recovered_force;
    }
    ctx.csv("wkb.csv", {"x", "k", "delta_x", "validity", "recovered_force"},
            {grid.points(), prof.k_of_x, prof.delta_x_of_x, prof.validity_metric, force});
    return out;
}

json run_dispersion(const json& p, const Constants& c, acceptance::CheckList& checks, Context&)
{
    const DispersionParams dp{p.at("k").get<double>(), p.at("m0").get<double>(), get_or(p, "c", c.c), get_or(p, "f", c.f)};
    const auto d = dispersion_checks(dp, c);
    checks.at_most("Klein-Gordon plane-wave residual", "residual", d.kg_residual);
    json out = {{"omega_kg", d.omega_kg}, {"kg_residual", d.kg_residual}, {"rest_frequency", dp.m0 * dp.c * dp.c / (2.0 * dp.f)}};
    if (dp.m0 > 0.0) {
        checks.at_most("Schroedinger plane-wave residual", "residual", d.nr_residual);
        out["omega_nr"] = d.omega_nr;
        out["nr_residual"] = d.nr_residual;
    }
    return out;
}

json run_bounds(const json& p, const Constants& c, acceptance::CheckList& checks, Context&)
{
    const auto rb = rate_bounds(p.at("E").get<double>(), p.at("theta").get<double>(), c);
    const bool at_hbar = std::abs(c.f / (0.5 * c.hbar) - 1.0) <= 1e-15;
    if (at_hbar) {
        checks.at_most("|bound_f / bound_h - 1| at f = hbar/2", "identity", std::abs(rb.bound_f / rb.bound_h - 1.0));
    }
    checks.at_most("|per_interval_cap - 1/(2 ln 2)|", "per_interval_cap",
                   std::abs(rb.per_interval_cap - 1.0 / (2.0 * std::log(2.0))));
    checks.holds("bremermann < bound_h < bekenstein", "ordering", rb.bremermann < rb.bound_h && rb.bound_h < rb.bekenstein);
    return {{"bound_f", rb.bound_f},
            {"bound_h", rb.bound_h},
            {"bremermann", rb.bremermann},
            {"bekenstein", rb.bekenstein},
            {"energy_rate_cap", rb.energy_rate_cap},
            {"per_interval_cap", rb.per_interval_cap},
            {"continuous_bound", rb.continuous_bound},
            {"continuous_bound_hbar", rb.continuous_bound_hbar},
            {"pendry", rb.pendry},
            {"pendry_ratio", rb.pendry_ratio},
            {"f_is_hbar_over_2", at_hbar}};
}

json run_regime(const json& p, const Constants&, acceptance::CheckList& checks, Context&)
{
    const RegimeMetrics m{p.at("mean_abs_dI").get<double>(), p.at("max_step_dI_q").get<double>(),
                          p.at("max_step_dI_p").get<double>()};
    RegimeThresholds th;
    th.tol_zero = get_or(p, "tol_zero", th.tol_zero);
    th.tol_small = get_or(p, "tol_small", th.tol_small);
    const auto r = regime_classify(m, th);
    if (p.contains("expected_label")) {
        checks.holds("label is " + p.at("expected_label").get<std::string>(), "label",
                     regime_label_name(r.label) == p.at("expected_label").get<std::string>());
    }
    return metrics_json(r);
}

acceptance::Tolerances tolerances_for(const KindSpec& spec, const json& cfg, const std::vector<std::string>& overrides)
{
    acceptance::Tolerances tol = spec.tolerances;
    if (cfg.contains("tolerances")) {
        for (const auto& [k, v] : cfg.at("tolerances").items()) {
            tol[k] = v.get<double>();
        }
    }
    for (const auto& o : overrides) {
        try {
            acceptance::apply_override(tol, o);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    return tol;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw Error("cannot write " + path.string());
    }
    os << text;
}

void finish(RunResult& res, json body, double seconds)
{
    if (!body.contains("criteria")) {
        body["checks"] = checks_json(res.checks);
    }
    body["artifacts"] = res.artifacts;
    body["pass"] = res.pass;
    const std::string sum = fnv1a_hex(body.dump(2));
    body["checksum"] = sum;
    res.report = std::move(body);
    res.timing["seconds_total"] = seconds;
    write_text(res.out_dir / "report.json", res.report.dump(2) + "\n");
    write_text(res.out_dir / "timing.json", res.timing.dump(2) + "\n");
}

}  // namespace

json load_config(const fs::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw ConfigError("cannot read config " + path.string());
    }
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
}

void validate(const json& cfg)
{
    if (!cfg.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    const auto top = top_level_fields();
    validate_object(cfg, top, "");
    const auto& spec = kind_spec(cfg.at("kind").get<std::string>());
    const json params = cfg.contains("params") ? cfg.at("params") : json::object();
    validate_object(params, spec.params, "params");
    if (cfg.contains("tolerances")) {
        for (const auto& [k, v] : cfg.at("tolerances").items()) {
            if (spec.tolerances.find(k) == spec.tolerances.end()) {
                throw ConfigError("unknown key 'tolerances." + k + "'");
            }
            if (!v.is_number() || !std::isfinite(v.get<double>()) || v.get<double>() < 0.0) {
                throw ConfigError("key 'tolerances." + k + "' must be a non-negative number");
            }
        }
    }
}

json schema()
{
    json top = json::array();
    for (const auto& f : top_level_fields()) {
        top.push_back(field_schema(f));
    }
    json ks = json::object();
    for (const auto& k : kinds()) {
        json params = json::array();
        for (const auto& f : k.params) {
            params.push_back(field_schema(f));
        }
        ks[k.name] = {{"doc", k.doc}, {"params", params}, {"tolerances", k.tolerances}};
    }
    return {{"tool", "cpdq-lab"}, {"version", kVersion}, {"top_level", top}, {"kinds", ks}};
}

RunResult run_config(const json& cfg, const RunOptions& opts)
{
    validate(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const auto kind = cfg.at("kind").get<std::string>();
    const auto& spec = kind_spec(kind);
    auto tol = tolerances_for(spec, cfg, opts.tolerance_overrides);

    fs::path out = opts.out_dir;
    if (out.empty()) {
        out = cfg.contains("output_dir") ? fs::path(cfg.at("output_dir").get<std::string>()) : fs::path("cpdq-lab-out");
    }
    fs::create_directories(out);

    if (kind == "suite") {
        std::string filter = opts.filter;
        if (filter.empty() && cfg.contains("params")) {
            filter = cfg.at("params").value("filter", std::string());
        }
        return run_suite(filter, tol, out);
    }

    const Constants c = resolve_constants(cfg);
    const json params = cfg.contains("params") ? cfg.at("params") : json::object();
    Context ctx{out, {}};
    acceptance::CheckList list(tol);
    json results;
    if (kind == "trajectory") {
        results = run_trajectory(params, c, list, ctx);
    } else if (kind == "piston") {
        results = run_piston(params, c, list, ctx);
    } else if (kind == "tise") {
        results = run_tise(params, c, list, ctx);
    } else if (kind == "variational") {
        results = run_variational(params, c, list, ctx);
    } else if (kind == "wkb") {
        results = run_wkb(params, c, list, ctx);
    } else if (kind == "dispersion") {
        results = run_dispersion(params, c, list, ctx);
    } else if (kind == "bounds") {
        results = run_bounds(params, c, list, ctx);
    } else {
        results = run_regime(params, c, list, ctx);
    }

    RunResult res;
    res.out_dir = out;
    res.checks = list.take();
    res.artifacts = ctx.artifacts;
    res.pass = std::all_of(res.checks.begin(), res.checks.end(), [](const acceptance::Check& k) { return k.pass; });
    json body = {{"tool", "cpdq-lab"},
                 {"version", kVersion},
                 {"scenario", cfg},
                 {"constants", constants_json(c)},
                 {"results", results}};
    finish(res, std::move(body), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return res;
}

RunResult run_suite(const std::string& filter, const acceptance::Tolerances& tol, const fs::path& out_dir)
{
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(out_dir);
    const auto results = acceptance::run_suite(filter, tol, acceptance::thread_cap());

    RunResult res;
    res.out_dir = out_dir;
    json criteria = json::array();
    json timing = json::array();
    bool runtime_ok = true;
    std::vector<acceptance::Check> all_checks;
    for (const auto& r : results) {
        const std::string sub = "c" + std::to_string(r.id);
        fs::create_directories(out_dir / sub);
        std::ostringstream csv;
        csv << "check,value,relation,tolerance,pass\n";
        for (const auto& k : r.checks) {
            std::string name = k.name;
            std::replace(name.begin(), name.end(), ',', ';');
            csv << name << ',' << format_number(k.value) << ',' << acceptance::relation_symbol(k.relation) << ','
                << format_number(k.tolerance) << ',' << (k.pass ? 1 : 0) << '\n';
        }
        write_text(out_dir / sub / "checks.csv", csv.str());
        res.artifacts.push_back(sub + "/checks.csv");
        all_checks.insert(all_checks.end(), r.checks.begin(), r.checks.end());
        criteria.push_back({{"id", r.id},
                            {"name", r.name},
                            {"tags", r.tags},
                            {"pass", r.pass()},
                            {"error", r.error},
                            {"checks", checks_json(r.checks)}});
        timing.push_back({{"id", r.id},
                          {"seconds", r.seconds},
                          {"runtime_limit", r.runtime_limit ? json(*r.runtime_limit) : json(nullptr)},
                          {"runtime_ok", r.runtime_ok()}});
        runtime_ok = runtime_ok && r.runtime_ok();
        res.pass = res.pass && r.pass();
    }
    res.timing["criteria"] = timing;
    res.timing["runtime_ok"] = runtime_ok;
    json tol_json = tol;
    json body = {{"tool", "cpdq-lab"},
                 {"version", kVersion},
                 {"scenario", {{"kind", "suite"}, {"filter", filter}}},
                 {"tolerances", tol_json},
                 {"criteria", criteria}};
    finish(res, std::move(body), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    res.checks = all_checks;
    res.pass = res.pass && runtime_ok;
    return res;
}

std::string fnv1a_hex(const std::string& bytes)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_number(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const fs::path& path, const std::vector<std::string>& header, const std::vector<std::vector<double>>& columns)
{
    if (header.size() != columns.size()) {
        throw PreconditionError("write_csv: header and column counts differ");
    }
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& col : columns) {
        if (col.size() != rows) {
            throw PreconditionError("write_csv: columns of unequal length");
        }
    }
    std::string text;
    for (std::size_t j = 0; j < header.size(); ++j) {
        text += (j ? "," : "") + header[j];
    }
    text += '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (j) {
                text += ',';
            }
            text += format_number(columns[j][i]);
        }
        text += '\n';
    }
    write_text(path, text);
}

}  // namespace cpdq::scenario
