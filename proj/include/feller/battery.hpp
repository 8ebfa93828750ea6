#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "feller/operators.hpp"
#include "feller/probes.hpp"

namespace feller {

struct Witness {
  std::string input;
  double defect = 0.0;
};

struct CheckResult {
  std::string id;
  bool pass = false;
  double max_defect = 0.0;
  double tolerance = 0.0;
  std::vector<Witness> witnesses;  // worst three, largest first
  bool aborted = false;
};

struct BatteryConfig {
  std::vector<double> t_grid = {1.0, 0.3, 0.1, 0.03, 0.01};
  std::vector<double> lambda_grid = {1.0, 4.0, 16.0, 64.0, 256.0};
  double decay_tol = 1e-3;
  double continuity_factor = 10.0;  // continuity tol = factor * h * Lipschitz scale
  std::optional<double> continuity_tol;
  double exact_tol = 1e-10;    // axioms and commutation on generator backings
  double lemma4_slack = 1e-12;  // relative to |f|
  double limit_tol = 5e-2;     // strong continuity / Yosida limits
  double min_rcond = 1e-6;
  std::uint64_t seed = 42;
  int random_probes = 20;
  int quadrature_nodes = 64;
};

struct C0Tolerances {
  double decay = 1e-3;
  double continuity = 1.0;
};

struct TruncationDefects {
  double half_width = 0.0;
  double u_c0_defect = 0.0;  // normalised: 1 is the pass threshold
  double r_c0_defect = 0.0;
};

struct FellerReport {
  std::string process;
  std::vector<std::pair<std::string, double>> parameters;
  SpacePtr space;
  BatteryConfig config;
  std::vector<double> t_grid;       // after snapping to the time lattice
  std::vector<double> lambda_grid;  // sorted
  C0Tolerances c0;
  double lipschitz_scale = 1.0;
  double axiom_tol = 0.0;
  std::vector<std::string> probes;
  std::vector<std::string> excluded_probes;  // failed c0_verdict as inputs
  std::vector<CheckResult> checks;
  std::vector<TruncationDefects> truncation;
  bool equivalence_consistent = false;
  bool complete = true;
  std::optional<bool> expected_feller;
  bool verdict_matches_expected = false;

  const CheckResult* find(const std::string& id) const;
  /// Common value of thm_a..thm_f, or nullopt when they disagree.
  std::optional<bool> verdict() const;
};

/// Probes and grids prepared for one family.
struct BatteryInputs {
  std::vector<Probe> probes;
  std::vector<std::string> excluded;
  std::vector<double> t_grid;  // descending
  std::vector<double> lambda_grid;  // ascending
  C0Tolerances c0;
  double lipschitz_scale = 1.0;
};

BatteryInputs prepare_inputs(const OperatorFamily& fam, const BatteryConfig& cfg);

/// Rounds times to the family's time lattice (at least one step), sorted
/// descending without duplicates.
std::vector<double> snap_times(const OperatorFamily& fam, std::vector<double> ts);

/// def1_a, def1_b, def2_a, def2_b; positivity is folded into the _a checks.
std::vector<CheckResult> check_axioms(const OperatorFamily& fam,
                                      const std::vector<Probe>& probes,
                                      const std::vector<double>& t_grid,
                                      const std::vector<double>& lambda_grid,
                                      const BatteryConfig& cfg = {});

struct LimitCheck {
  CheckResult norm;       // def1_c / def2_c
  CheckResult pointwise;  // feeds thm_c/thm_e or thm_d/thm_f
  std::vector<bool> probe_pass;
};

LimitCheck check_strong_continuity(const OperatorFamily& fam,
                                   const std::vector<Probe>& probes,
                                   const std::vector<double>& t_grid,
                                   const BatteryConfig& cfg = {});
LimitCheck check_yosida(const OperatorFamily& fam,
                        const std::vector<Probe>& probes,
                        const std::vector<double>& lambda_grid,
                        const BatteryConfig& cfg = {});

/// {U-preservation, R-preservation}. Defects are max(decay/decay_tol,
/// continuity/continuity_tol) over all images, so the tolerance is 1. The
/// resolvent images are scaled to lambda R_lambda f.
std::pair<CheckResult, CheckResult> check_c0_preservation(
    const OperatorFamily& fam, const std::vector<Probe>& probes,
    const std::vector<double>& t_grid, const std::vector<double>& lambda_grid,
    const C0Tolerances& tols, const BatteryConfig& cfg = {});

/// Defect (|U_t R f - R f| - (2/lambda)(1 - e^{-lambda t})|f|)/|f|; kernel
/// backings first subtract twice the quadrature error estimate.
CheckResult check_lemma4_bound(const OperatorFamily& fam,
                               const std::vector<double>& lambda_grid,
                               const std::vector<double>& t_grid,
                               const std::vector<Probe>& probes,
                               const BatteryConfig& cfg = {});

CheckResult check_commutation(const OperatorFamily& fam,
                              const std::vector<Probe>& probes,
                              const std::vector<double>& t_grid,
                              const std::vector<double>& lambda_grid,
                              const BatteryConfig& cfg = {});

/// Generator backings only. Defect is 1/rcond(lambda I - Q), the tolerance
/// 1/min_rcond.
CheckResult check_density_rank(const OperatorFamily& fam,
                               const std::vector<double>& lambda_grid,
                               const BatteryConfig& cfg = {});

/// Runs every check. `wider` (same process on a larger window) adds a
/// second row of C0-preservation defects to the truncation table.
FellerReport run_battery(const OperatorFamily& fam, const BatteryConfig& cfg,
                         const OperatorFamily* wider = nullptr);

void set_expected(FellerReport& report, std::optional<bool> expected_feller);

}  // namespace feller
