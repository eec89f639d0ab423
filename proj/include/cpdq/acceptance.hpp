#ifndef CPDQ_ACCEPTANCE_HPP
#define CPDQ_ACCEPTANCE_HPP

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cpdq::acceptance {

enum class Relation { at_most, at_least };

//! One measured quantity compared against a named tolerance.
struct Check {
    std::string name;
    std::string tolerance_key;
    double value;
    double tolerance;
    Relation relation;
    bool pass;
};

using Tolerances = std::map<std::string, double>;

struct CriterionResult {
    int id;
    std::string name;
    std::vector<std::string> tags;
    std::vector<Check> checks;
    std::string error;  //!< set when the criterion threw instead of producing checks
    double seconds = 0.0;
    std::optional<double> runtime_limit;

    bool runtime_ok() const { return !runtime_limit || seconds <= *runtime_limit; }
    //! True when every check passed and nothing threw. Runtime is judged separately.
    bool pass() const;
    //! First failing check, if any.
    const Check* first_failure() const;
};

class CheckList {
public:
    explicit CheckList(const Tolerances& tol) : tol_(tol) {}

    void at_most(const std::string& name, const std::string& key, double value);
    void at_least(const std::string& name, const std::string& key, double value);
    void holds(const std::string& name, const std::string& key, bool condition);

    std::vector<Check> take() { return std::move(checks_); }

private:
    double tolerance(const std::string& key) const;

    const Tolerances& tol_;
    std::vector<Check> checks_;
};

struct Criterion {
    int id;
    std::string name;
    std::vector<std::string> tags;
    std::optional<double> runtime_limit;  //!< seconds
    std::function<void(CheckList&)> run;
};

//! The twelve criteria in id order.
const std::vector<Criterion>& criteria();

Tolerances default_tolerances();

//! Applies NAME=VALUE overrides. Throws std::invalid_argument for unknown names or bad numbers.
void apply_override(Tolerances& tol, const std::string& assignment);

bool matches_filter(const Criterion& c, const std::string& filter);

CriterionResult run_criterion(const Criterion& c, const Tolerances& tol);

//! Runs every criterion matching `filter` (empty = all) on up to `threads` workers.
//! Results come back in id order regardless of scheduling.
std::vector<CriterionResult> run_suite(const std::string& filter, const Tolerances& tol, std::size_t threads);

//! Worker count from CPDQ_LAB_THREADS (>= 1), falling back to the hardware concurrency.
std::size_t thread_cap();

std::string relation_symbol(Relation r);

}  // namespace cpdq::acceptance

#endif  // CPDQ_ACCEPTANCE_HPP
