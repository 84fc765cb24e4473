#pragma once
// Oracle and cross-engine checks shared by `tmsq validate` and the acceptance
// test. Each check owns named tolerances; callers may override them.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tmsq/model.hpp"

namespace tmsq {

enum class Bound { at_most, at_least };

struct Tolerance {
  std::string key;
  double value = 0.0;
  Bound bound = Bound::at_most;
};

struct Metric {
  std::string name;
  double value = 0.0;
  std::optional<Tolerance> limit;  // empty for informational values
  bool passed = true;
};

struct CheckResult {
  std::string id;
  std::string name;
  std::string description;
  std::vector<Metric> metrics;
  std::vector<std::string> notes;
  std::string error;  // set when the check threw
  double seconds = 0.0;
  bool passed = false;
};

class CheckContext {
 public:
  CheckContext(const std::vector<Tolerance>& tolerances, CheckResult& result)
      : tolerances_(tolerances), result_(result) {}
  double tol(const std::string& key) const;
  // Records a value compared against tolerance `key`.
  void check(const std::string& name, double value, const std::string& key);
  // Boolean requirement (value 1 = holds).
  void require(const std::string& name, bool holds);
  void info(const std::string& name, double value);
  void note(std::string text) { result_.notes.push_back(std::move(text)); }

 private:
  const std::vector<Tolerance>& tolerances_;
  CheckResult& result_;
};

struct CheckDefinition {
  std::string id;  // "1".."12" for acceptance criteria, "I<n>" for invariants
  std::string name;
  std::string description;
  std::vector<Tolerance> tolerances;
  std::function<void(CheckContext&)> run;
};

struct ValidationOptions {
  // "<id or name>=x" sets the first tolerance, "<id or name>.<key>=x" a named one.
  std::map<std::string, double> overrides;
  // Restrict to these ids or names; empty runs everything.
  std::vector<std::string> only;
  // Parameter set standing in for the bundled experimental config.
  std::optional<PhysicalParams> microwave;
  // Produces the CSV of one simulate run for a given seed. Defaults to an
  // in-process collision-engine run.
  std::function<std::string(std::uint64_t seed)> simulate_csv;
  // Produces the fig2 CSV (header r,n_bar,total_time_2T). Defaults to
  // fig2_rows on the default grid with the default γ inputs.
  std::function<std::string()> fig2_csv;
};

// Linear-frequency values quoted for the microwave-cavity proposal: g/2π = 50 kHz,
// Ω₁/2π = 40 kHz, Ω₂ = Ω₁/0.48, Δ₁/2π = −1 MHz, Δ₂ = −2Δ₁. γₑ, r_a and τ are
// not quoted; the values here give Θ_bτ ≈ 0.1 and r_aτ ≈ 0.1.
PhysicalParams microwave_params();

// Applies the overrides (throws InvalidArgument for an unknown id or key).
std::vector<CheckDefinition> validation_checks(const ValidationOptions& options);

std::vector<CheckResult> run_validation(const ValidationOptions& options,
                                        const std::function<void(const CheckResult&)>& on_result = {});

nlohmann::json validation_summary(const std::vector<CheckResult>& results);

// One line per check: "[PASS] 5 adiabatic_elimination  min_overlap=0.99218 (>= 0.99)".
std::string format_check_line(const CheckResult& r);

}  // namespace tmsq
