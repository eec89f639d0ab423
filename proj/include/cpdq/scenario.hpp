#ifndef CPDQ_SCENARIO_HPP
#define CPDQ_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "cpdq/acceptance.hpp"
#include "cpdq/core.hpp"

namespace cpdq::scenario {

inline constexpr const char* kVersion = "0.1.0";

//! Malformed JSON or a config that does not match the schema (exit status 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

enum ExitCode : int { exit_pass = 0, exit_computation = 1, exit_config = 2, exit_check = 3 };

//! Reads and parses a JSON file. Throws ConfigError when unreadable or malformed.
nlohmann::json load_config(const std::filesystem::path& path);

//! Rejects unknown keys at every level, wrong types, bad enum values and missing
//! required fields. Throws ConfigError naming the offending key path.
void validate(const nlohmann::json& cfg);

//! Machine-readable description of every accepted key, built from the same tables as validate().
nlohmann::json schema();

struct RunOptions {
    std::filesystem::path out_dir;  //!< empty: config "output_dir", then "cpdq-lab-out"
    std::vector<std::string> tolerance_overrides;  //!< NAME=VALUE, applied after the config's own
    std::string filter;  //!< suite kind only
};

struct RunResult {
    nlohmann::json report;  //!< deterministic, includes "checksum"
    nlohmann::json timing;
    std::vector<acceptance::Check> checks;
    std::vector<std::string> artifacts;
    std::filesystem::path out_dir;
    bool pass = true;
};

//! Validates, runs the pipeline named by "kind", and writes report.json, timing.json and
//! any CSV series into the output directory. Library errors propagate.
RunResult run_config(const nlohmann::json& cfg, const RunOptions& opts);

//! Runs the acceptance criteria, writing one subdirectory per criterion plus a summary report.
RunResult run_suite(const std::string& filter, const acceptance::Tolerances& tol, const std::filesystem::path& out_dir);

//! 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

//! "%.17g"; nan and inf spelled out.
std::string format_number(double v);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

}  // namespace cpdq::scenario

#endif  // CPDQ_SCENARIO_HPP
