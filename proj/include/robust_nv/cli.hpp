/**
 * @file cli.hpp
 * @brief Instance files and the `robust_nv` command line.
 *
 * Instance files are JSON:
 *
 *     {
 *       "version": 1,
 *       "items": [{"c": 1, "m": 1, "d": 1, "a": 10, "mu": 30, "b": 50, "mad": 10,
 *                  "beta": 0.5, "sigma": 11.5,
 *                  "ground_truth": {"family": "uniform", "params": [10, 50]}}],
 *       "budget": 45,
 *       "options": {"seed": 7, "grid_points": 101, "gamma": 0.75,
 *                   "yields": [{"a": 0.65, "mu": 0.8, "b": 0.95, "mad": 0.075}],
 *                   "extra_constraints": [{"coeffs": [2], "budget": 80}]}
 *     }
 *
 * `beta`, `sigma`, `ground_truth`, `budget` (or `budget_grid`) and
 * `options` are optional. Ground-truth families: uniform [a, b],
 * beta [k, lambda, a, b], triangular [a, b, mode], and discrete with
 * `points` and `probs` arrays.
 */

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "robust_nv/baselines.hpp"
#include "robust_nv/extensions.hpp"
#include "robust_nv/knapsack.hpp"

namespace robust_nv::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kParse = 2,
    kSchema = 3,
    kMoments = 4,
    kSolver = 5,
};

/// An error carrying the process exit code it maps to.
class CliError : public std::runtime_error {
public:
    CliError(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
    int code() const { return code_; }

private:
    int code_;
};

struct GroundTruthSpec {
    std::string family;
    std::vector<double> params;
    std::vector<double> points;
    std::vector<double> probs;

    GroundTruthDistribution build() const;
    bool operator==(const GroundTruthSpec&) const = default;
};

struct InstanceFile {
    int version = 1;
    std::vector<Item> items;
    std::vector<std::optional<GroundTruthSpec>> ground_truth;
    std::optional<double> budget;
    std::vector<double> budget_grid;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> grid_points;
    std::optional<double> gamma;
    std::vector<YieldSpec> yields;
    std::vector<BudgetRow> extra_constraints;

    bool operator==(const InstanceFile&) const = default;
};

/// Parse and validate. Throws CliError with kParse, kSchema or kMoments;
/// moment violations of every item are listed together.
InstanceFile parse_instance(const std::string& text);
InstanceFile load_instance(const std::string& path);

/// Canonical JSON; parse_instance(to_json(f)) == f.
std::string to_json(const InstanceFile& file);

/// Round to 10 significant digits (the precision of all reported numbers).
double round10(double x);

/// Write `content` to `path` through a temporary file and a rename.
void write_atomically(const std::string& path, const std::string& content);

/// CSV for a sweep: header plus one line per (budget, policy, item).
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Run one command line (args exclude the program name). Results go to
/// `out`, diagnostics to `err`; returns the exit code.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace robust_nv::cli
