#include "feller/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "feller/battery.hpp"
#include "feller/report.hpp"

namespace feller {

namespace {

const std::vector<double> kInvertLambdas = {1.0, 2.0, 4.0, 8.0, 16.0};
constexpr double kInvertTime = 0.25;
const std::vector<double> kSweepLambdas = {0.5, 1.0, 2.0, 4.0, 8.0};
const std::vector<double> kSweepTimes = {1e-3, 1e-2, 0.1, 1.0};

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (!cfg.report_path) {
    out << text;
    out.flush();
    return;
  }
  std::ofstream file(*cfg.report_path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open " + *cfg.report_path + " for writing");
  file << text;
  file.close();
  if (!file) throw std::runtime_error("failed writing " + *cfg.report_path);
}

double parameter(const CatalogEntry& e, const std::string& key) {
  for (const auto& [k, v] : e.parameters)
    if (k == key) return v;
  throw std::logic_error("missing parameter " + key);
}

Json parameters_json(const CatalogEntry& e) {
  Json j = Json::object();
  for (const auto& [k, v] : e.parameters) j[k] = v;
  return j;
}

std::string format_or(const RunConfig& cfg, const char* fallback) {
  return cfg.format.empty() ? fallback : cfg.format;
}

struct SweepSummary {
  Json json;
  std::string csv;
  bool pass = true;
};

// Resolvent identity over all pairs lambda <= mu and the smoothing bound over lambda x t,
// batched so each operator application covers every probe.
SweepSummary resolvent_sweep(const Process& p, const RunConfig& cfg) {
  const OperatorFamily& fam = p.family;
  std::vector<double> ls = cfg.lambda_grid.empty() ? kSweepLambdas : cfg.lambda_grid;
  std::sort(ls.begin(), ls.end());
  ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
  std::vector<double> ts = cfg.t_grid.empty() ? kSweepTimes : cfg.t_grid;
  ts = snap_times(fam, ts);
  std::reverse(ts.begin(), ts.end());
  for (double v : ls)
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("lambda grid values must be positive");

  std::vector<Probe> probes;
  for (auto& pr : standard_probes(fam.space_ptr(), cfg.seed, 20))
    if (pr.random) probes.push_back(std::move(pr));
  const auto n = static_cast<Eigen::Index>(fam.space().size());
  const auto m = static_cast<Eigen::Index>(probes.size());
  Matrix f(n, m);
  std::vector<double> norms;
  for (Eigen::Index j = 0; j < m; ++j) {
    f.col(j) = probes[static_cast<std::size_t>(j)].f.values();
    norms.push_back(sup_norm(probes[static_cast<std::size_t>(j)].f));
  }

  const bool exact = fam.has_exact_resolvent();
  const double id_tol = exact ? 1e-10 : fam.kernel_tol();
  const double slack = 1e-12;
  std::vector<ResolventEstimate> r;
  for (double l : ls) r.push_back(fam.resolvent(l, f));

  SweepSummary s;
  s.csv = "kind,lambda,second,value\n";
  Json pairs = Json::array();
  double max_id = 0.0;
  for (std::size_t a = 0; a < ls.size(); ++a) {
    Matrix stacked(n, m * static_cast<Eigen::Index>(ls.size() - a));
    for (std::size_t b = a; b < ls.size(); ++b)
      stacked.middleCols(static_cast<Eigen::Index>(b - a) * m, m) = r[b].value;
    const Matrix rr = fam.resolvent(ls[a], stacked).value;
    for (std::size_t b = a; b < ls.size(); ++b) {
      const double resid =
          ((r[a].value - r[b].value) - (ls[b] - ls[a]) * rr.middleCols(static_cast<Eigen::Index>(b - a) * m, m))
              .cwiseAbs()
              .maxCoeff();
      max_id = std::max(max_id, resid);
      Json row;
      row["lambda"] = ls[a];
      row["mu"] = ls[b];
      row["residual"] = resid;
      pairs.push_back(row);
      s.csv += "identity," + format_number(ls[a]) + "," + format_number(ls[b]) + "," + format_number(resid) + "\n";
    }
  }

  Matrix stacked(n, m * static_cast<Eigen::Index>(ls.size()));
  for (std::size_t a = 0; a < ls.size(); ++a) stacked.middleCols(static_cast<Eigen::Index>(a) * m, m) = r[a].value;
  int cases = 0, violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (double t : ts) {
    const Matrix moved = fam.semigroup(t, stacked);
    for (std::size_t a = 0; a < ls.size(); ++a) {
      const double l = ls[a];
      double row_worst = -std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < m; ++j) {
        const double norm = norms[static_cast<std::size_t>(j)];
        if (norm == 0.0) continue;
        const auto col = static_cast<Eigen::Index>(a) * m + j;
        const double lhs = (moved.col(col) - r[a].value.col(j)).cwiseAbs().maxCoeff();
        const double bound = (2.0 / l) * (-std::expm1(-l * t)) * norm;
        const double excess = (lhs - bound - 2.0 * r[a].error_estimate) / norm;
        ++cases;
        if (excess > slack) ++violations;
        row_worst = std::max(row_worst, excess);
      }
      worst = std::max(worst, row_worst);
      s.csv += "lemma4," + format_number(l) + "," + format_number(t) + "," + format_number(row_worst) + "\n";
    }
  }

  Json id;
  id["tolerance"] = id_tol;
  id["max_residual"] = max_id;
  id["pass"] = max_id <= id_tol;
  id["pairs"] = pairs;
  Json l4;
  l4["slack"] = slack;
  l4["cases"] = cases;
  l4["violations"] = violations;
  l4["max_excess"] = worst;
  l4["pass"] = violations == 0;
  s.pass = max_id <= id_tol && violations == 0;

  s.json["process"] = p.entry.name;
  s.json["parameters"] = parameters_json(p.entry);
  s.json["lambda_grid"] = ls;
  s.json["t_grid"] = ts;
  s.json["probes"] = static_cast<int>(m);
  s.json["resolvent_identity"] = id;
  s.json["lemma4"] = l4;
  s.json["pass"] = s.pass;
  return s;
}

}  // namespace

void cmd_list(std::ostream& out) {
  for (const auto& e : catalog_entries()) {
    out << e.name << "\texpected_feller=" << (e.expected_feller ? "true" : "false");
    for (const auto& [k, v] : e.parameters) {
      std::ostringstream num;
      num << v;
      out << '\t' << k << '=' << num.str();
    }
    out << '\n';
  }
}

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const Process p = build_process(cfg.process, cfg.params);
    BatteryConfig bc;
    if (!cfg.t_grid.empty()) bc.t_grid = cfg.t_grid;
    if (!cfg.lambda_grid.empty()) bc.lambda_grid = cfg.lambda_grid;
    bc.decay_tol = cfg.decay_tol;
    bc.seed = cfg.seed;
    const std::string format = format_or(cfg, "json");

    // Kernel processes live on a truncated window; repeat the C0 checks on
    // one twice as wide so the effect of L is visible.
    std::optional<Process> wider;
    if (!p.family.has_exact_resolvent()) {
      ProcessParams wp = cfg.params;
      wp.half_width = 2.0 * parameter(p.entry, "L");
      try {
        wider = build_process(cfg.process, wp);
      } catch (const std::invalid_argument& e) {
        err << "check: skipping the wider window: " << e.what() << '\n';
      }
    }

    FellerReport rep = run_battery(p.family, bc, wider ? &wider->family : nullptr);
    rep.process = p.entry.name;
    rep.parameters = p.entry.parameters;
    set_expected(rep, p.entry.expected_feller);

    emit(cfg, format == "csv" ? report_to_csv(rep) : dump_json(report_to_json(rep)), out);

    const auto verdict = rep.verdict();
    err << "check: process=" << rep.process << " verdict="
        << (verdict ? (*verdict ? "feller" : "not-feller") : "split")
        << " expected=" << (p.entry.expected_feller ? "feller" : "not-feller")
        << (rep.complete ? "" : " (incomplete)") << '\n';
    if (!rep.equivalence_consistent) return kSplitVerdict;
    if (!rep.verdict_matches_expected) return kMismatch;
    return kOk;
  } catch (const std::exception& e) {
    err << "check: " << e.what() << '\n';
    return kConfigError;
  }
}

int cmd_invert(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const Process p = build_process(cfg.process, cfg.params);
    if (!p.family.has_exact_resolvent())
      throw std::invalid_argument("invert needs a generator-backed process for its reference semigroup");
    InversionConfig base;
    base.term_tol = cfg.term_tol;
    base.summation = cfg.summation;
    const double t = cfg.t.value_or(kInvertTime);
    const std::vector<double> lambdas = cfg.lambda_grid.empty() ? kInvertLambdas : cfg.lambda_grid;

    Vector e0 = Vector::Zero(static_cast<Eigen::Index>(p.family.space().size()));
    e0[0] = 1.0;
    const GridFunction f(p.family.space_ptr(), std::move(e0));
    const auto sweep = inversion_convergence_sweep(p.family, t, f, lambdas, base);

    std::string text;
    if (format_or(cfg, "csv") == "json") {
      Json rows = Json::array();
      for (const auto& s : sweep) {
        Json row;
        row["lambda"] = s.lambda;
        row["sup_error"] = s.sup_error;
        row["terms_used"] = s.terms_used;
        row["cancellation_magnitude"] = s.cancellation_magnitude;
        row["tail_bound"] = s.tail_bound;
        rows.push_back(row);
      }
      text = dump_json(rows);
    } else {
      text = "lambda,sup_error,terms_used,cancellation_magnitude,tail_bound\n";
      for (const auto& s : sweep)
        text += format_number(s.lambda) + "," + format_number(s.sup_error) + "," +
                std::to_string(s.terms_used) + "," + format_number(s.cancellation_magnitude) + "," +
                format_number(s.tail_bound) + "\n";
    }
    emit(cfg, text, out);

    bool decreasing = true;
    for (std::size_t i = 1; i < sweep.size(); ++i) decreasing = decreasing && sweep[i].sup_error < sweep[i - 1].sup_error;
    err << "invert: process=" << p.entry.name << " t=" << t << " rows=" << sweep.size()
        << " final_sup_error=" << format_number(sweep.empty() ? 0.0 : sweep.back().sup_error)
        << " strictly_decreasing=" << (decreasing ? "true" : "false") << " summation=" << to_string(cfg.summation)
        << '\n';
    return kOk;
  } catch (const std::exception& e) {
    err << "invert: " << e.what() << '\n';
    return kConfigError;
  }
}

int cmd_resolvent(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const Process p = build_process(cfg.process, cfg.params);
    const SweepSummary s = resolvent_sweep(p, cfg);
    emit(cfg, format_or(cfg, "json") == "csv" ? s.csv : dump_json(s.json), out);
    err << "resolvent: process=" << p.entry.name
        << " identity_max=" << format_number(s.json["resolvent_identity"]["max_residual"].get<double>())
        << " lemma4_violations=" << s.json["lemma4"]["violations"].get<int>() << '\n';
    return s.pass ? kOk : kMismatch;
  } catch (const std::exception& e) {
    err << "resolvent: " << e.what() << '\n';
    return kConfigError;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Markov semigroups, resolvents and Feller-property checks"};
  app.set_help_flag("--help", "Print this help and exit");
  app.require_subcommand(1);
  app.name("feller-kit");

  RunConfig cfg;
  std::optional<long long> n;
  std::optional<double> half_width, h;
  std::string summation = "compensated";

  auto* list = app.add_subcommand("list", "List catalog processes with their expected Feller label");
  auto* check = app.add_subcommand("check", "Run the Feller battery and write a JSON report");
  auto* invert = app.add_subcommand("invert", "Resolvent-series inversion sweep as CSV");
  auto* resolvent = app.add_subcommand("resolvent", "Resolvent identity and smoothing-bound sweeps");

  for (auto* c : {check, invert, resolvent}) {
    c->add_option("--process", cfg.process, "Catalog process name")->required();
    c->add_option("--n", n, "Number of states (chains)");
    c->add_option("--L", half_width, "Grid half-width (kernel processes)");
    c->add_option("--h", h, "Grid spacing (kernel processes)");
    c->add_option("--seed", cfg.seed, "Probe seed");
    c->add_option("--report", cfg.report_path, "Output file (default: stdout)");
    c->add_option("--lambda-grid", cfg.lambda_grid, "Comma-separated lambda values")->delimiter(',');
  }
  check->add_option("--format", cfg.format)->check(CLI::IsMember({"json", "csv"}));
  check->add_option("--t-grid", cfg.t_grid, "Comma-separated times")->delimiter(',');
  check->add_option("--tol-decay", cfg.decay_tol, "Decay tolerance on the boundary band");
  invert->add_option("--format", cfg.format)->check(CLI::IsMember({"json", "csv"}));
  invert->add_option("--t", cfg.t, "Time at which U_t is reconstructed");
  invert->add_option("--term-tol", cfg.term_tol, "Series truncation tolerance");
  invert->add_option("--summation", summation)->check(CLI::IsMember({"plain", "compensated"}));
  resolvent->add_option("--format", cfg.format)->check(CLI::IsMember({"json", "csv"}));
  resolvent->add_option("--t-grid", cfg.t_grid, "Comma-separated times")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "feller-kit: " << e.what() << '\n';
    return kConfigError;
  }
  if (list->parsed()) {
    cmd_list(out);
    return kOk;
  }
  if (n) {
    if (*n < 1) {
      err << "feller-kit: --n must be a positive integer\n";
      return kConfigError;
    }
    cfg.params.n = static_cast<std::size_t>(*n);
  }
  cfg.params.half_width = half_width;
  cfg.params.h = h;
  if (!(cfg.decay_tol > 0.0)) {
    err << "feller-kit: --tol-decay must be positive\n";
    return kConfigError;
  }
  if (!(cfg.term_tol > 0.0)) {
    err << "feller-kit: --term-tol must be positive\n";
    return kConfigError;
  }
  cfg.summation = parse_summation(summation);

  if (check->parsed()) return cmd_check(cfg, out, err);
  if (invert->parsed()) return cmd_invert(cfg, out, err);
  return cmd_resolvent(cfg, out, err);
}

}  // namespace feller
