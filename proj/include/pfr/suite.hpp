#pragma once

// Randomized identity and inequality suites. Every trial draws its inputs
// from its own seed, so any single instance can be replayed.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pfr/ruzsa.hpp"

namespace pfr {

struct SuiteConfig {
  int n = 5;
  int trials = 500;
  std::uint64_t seed = 42;
  /// Draw only point masses, for which every checked relation is trivial.
  bool point_masses = false;
  /// Suites to run; empty means all.
  std::vector<std::string> only;
};

struct SuiteOutcome {
  std::string suite;
  int trials_run = 0;
  std::size_t violations = 0;
  /// Largest deviation seen: -min slack for inequalities, max |lhs - rhs|
  /// for identities.
  double worst = 0;
  std::vector<IneqReport> reports;
  /// Serialized inputs of the first violating trial.
  std::optional<nlohmann::json> counterexample;
};

/// Names of all suites, in run order.
const std::vector<std::string>& suite_names();

/// Seed of trial `trial` of suite `suite`.
std::uint64_t instance_seed(std::uint64_t seed, const std::string& suite, int trial);

/// Runs one suite. Stops at the first violating trial.
SuiteOutcome run_suite(const std::string& name, const SuiteConfig& cfg);

/// Runs the selected suites in order, calling `on_done` after each.
std::vector<SuiteOutcome> run_suites(const SuiteConfig& cfg,
                                     const std::function<void(const SuiteOutcome&)>& on_done = {});

/// An exact identity a = b, holding when |a - b| <= tolerance.
IneqReport identity_report(std::string name, double a, double b, double tolerance);

}  // namespace pfr
