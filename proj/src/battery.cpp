#include "feller/battery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

namespace feller {

namespace {

std::string fmt(const char* key, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%.6g", key, v);
  return buf;
}

std::string join(std::initializer_list<std::string> parts) {
  std::string s;
  for (const auto& p : parts) {
    if (!s.empty()) s += ' ';
    s += p;
  }
  return s;
}

// Collects (input, defect) pairs; NaN counts as worse than anything.
class Tally {
 public:
  void add(std::string input, double defect) {
    if (std::isnan(defect)) defect = std::numeric_limits<double>::infinity();
    all_.push_back({std::move(input), defect});
  }

  CheckResult finish(std::string id, double tolerance) {
    CheckResult r;
    r.id = std::move(id);
    r.tolerance = tolerance;
    std::stable_sort(all_.begin(), all_.end(),
                     [](const Witness& a, const Witness& b) { return a.defect > b.defect; });
    r.max_defect = all_.empty() ? 0.0 : all_.front().defect;
    for (std::size_t i = 0; i < all_.size() && i < 3; ++i) r.witnesses.push_back(all_[i]);
    r.pass = r.max_defect <= tolerance;
    return r;
  }

 private:
  std::vector<Witness> all_;
};

Vector column_abs_max(const Matrix& m) {
  return m.cwiseAbs().colwise().maxCoeff().transpose();
}

Matrix hstack(const std::vector<const Matrix*>& blocks) {
  Eigen::Index cols = 0;
  for (const Matrix* b : blocks) cols += b->cols();
  Matrix out(blocks.front()->rows(), cols);
  Eigen::Index at = 0;
  for (const Matrix* b : blocks) {
    out.middleCols(at, b->cols()) = *b;
    at += b->cols();
  }
  return out;
}

// Probe matrix plus memoised U_t F and R_lambda F for one battery run.
class Context {
 public:
  Context(const OperatorFamily& fam, const std::vector<Probe>& probes, const BatteryConfig& cfg)
      : fam_(fam), cfg_(cfg) {
    if (probes.empty()) throw std::invalid_argument("battery needs at least one probe");
    const auto n = static_cast<Eigen::Index>(fam.space().size());
    f_.resize(n, static_cast<Eigen::Index>(probes.size()));
    for (std::size_t j = 0; j < probes.size(); ++j) {
      if (!(probes[j].f.space() == fam.space()))
        throw std::invalid_argument("probe '" + probes[j].name + "' lives on a different space");
      f_.col(static_cast<Eigen::Index>(j)) = probes[j].f.values();
      names_.push_back(probes[j].name);
      norms_.push_back(sup_norm(probes[j].f));
      nonneg_.push_back(probes[j].f.values().minCoeff() >= 0.0);
    }
  }

  const OperatorFamily& fam() const { return fam_; }
  const Matrix& f() const { return f_; }
  Eigen::Index count() const { return f_.cols(); }
  const std::string& name(Eigen::Index j) const { return names_[static_cast<std::size_t>(j)]; }
  double norm(Eigen::Index j) const { return norms_[static_cast<std::size_t>(j)]; }
  bool nonneg(Eigen::Index j) const { return nonneg_[static_cast<std::size_t>(j)]; }

  double axiom_tol() const {
    return fam_.has_exact_resolvent() ? cfg_.exact_tol : fam_.kernel_tol();
  }

  Matrix semigroup(double t, const Matrix& cols) const { return fam_.semigroup(t, cols); }

  ResolventEstimate resolvent(double lambda, const Matrix& cols) {
    if (fam_.has_exact_resolvent()) return {fam_.resolvent_exact(lambda, cols), 0.0};
    const QuadratureOptions opts{0.0, cfg_.quadrature_nodes};
    auto it = ops_.find(lambda);
    if (it == ops_.end()) it = ops_.emplace(lambda, fam_.resolvent_operator(lambda, opts)).first;
    if (it->second) return it->second->apply(cols);
    return fam_.resolvent_quadrature(lambda, cols, opts);
  }

  const Matrix& U(double t) {
    auto it = u_.find(t);
    if (it == u_.end()) it = u_.emplace(t, semigroup(t, f_)).first;
    return it->second;
  }

  const ResolventEstimate& R(double lambda) {
    auto it = r_.find(lambda);
    if (it == r_.end()) it = r_.emplace(lambda, resolvent(lambda, f_)).first;
    return it->second;
  }

 private:
  const OperatorFamily& fam_;
  const BatteryConfig& cfg_;
  Matrix f_;
  std::vector<std::string> names_;
  std::vector<double> norms_;
  std::vector<bool> nonneg_;
  std::map<double, Matrix> u_;
  std::map<double, ResolventEstimate> r_;
  std::map<double, std::optional<ResolventOperator>> ops_;  // dense kernels only
};

std::vector<double> descending(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<double> ascending(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void require_grid(const std::vector<double>& g, const char* what) {
  if (g.empty()) throw std::invalid_argument(std::string(what) + " grid is empty");
  for (double v : g)
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string(what) + " grid values must be positive and finite");
}

// Contraction and positivity of images G (= U_t F or lambda R_lambda F).
void contraction_defects(Context& ctx, const Matrix& g, const std::string& where, Tally& tally) {
  const Vector sup = column_abs_max(g);
  for (Eigen::Index j = 0; j < ctx.count(); ++j) {
    double d = std::max(0.0, sup[j] - ctx.norm(j));
    if (ctx.nonneg(j)) d = std::max(d, -g.col(j).minCoeff());
    tally.add(join({"probe=" + ctx.name(j), where}), d);
  }
}

CheckResult def1_a(Context& ctx, const std::vector<double>& ts) {
  Tally tally;
  const Matrix u0 = ctx.semigroup(0.0, ctx.f());
  const Vector id = column_abs_max(u0 - ctx.f());
  for (Eigen::Index j = 0; j < ctx.count(); ++j) tally.add("probe=" + ctx.name(j) + " t=0", id[j]);
  for (double t : ts) contraction_defects(ctx, ctx.U(t), fmt("t", t), tally);
  return tally.finish("def1_a", ctx.axiom_tol());
}

CheckResult def1_b(Context& ctx, const std::vector<double>& ts) {
  Tally tally;
  for (std::size_t a = 0; a < ts.size(); ++a) {
    for (std::size_t b = a; b < ts.size(); ++b) {
      const double t = ts[a], s = ts[b];
      const Matrix lhs = ctx.semigroup(t + s, ctx.f());
      const Matrix rhs = ctx.semigroup(t, ctx.U(s));
      const Vector d = column_abs_max(lhs - rhs);
      for (Eigen::Index j = 0; j < ctx.count(); ++j)
        tally.add(join({"probe=" + ctx.name(j), fmt("t", t), fmt("s", s)}), d[j]);
    }
  }
  return tally.finish("def1_b", ctx.axiom_tol());
}

CheckResult def2_a(Context& ctx, const std::vector<double>& lambdas) {
  Tally tally;
  for (double l : lambdas) contraction_defects(ctx, l * ctx.R(l).value, fmt("lambda", l), tally);
  return tally.finish("def2_a", ctx.axiom_tol());
}

CheckResult def2_b(Context& ctx, const std::vector<double>& lambdas) {
  Tally tally;
  for (std::size_t a = 0; a < lambdas.size(); ++a) {
    const double l = lambdas[a];
    std::vector<const Matrix*> blocks;
    for (std::size_t b = a; b < lambdas.size(); ++b) blocks.push_back(&ctx.R(lambdas[b]).value);
    const Matrix rr = ctx.resolvent(l, hstack(blocks)).value;
    for (std::size_t b = a; b < lambdas.size(); ++b) {
      const double m = lambdas[b];
      const auto off = static_cast<Eigen::Index>(b - a) * ctx.count();
      const Matrix resid = (ctx.R(l).value - ctx.R(m).value) - (m - l) * rr.middleCols(off, ctx.count());
      const Vector d = column_abs_max(resid);
      for (Eigen::Index j = 0; j < ctx.count(); ++j)
        tally.add(join({"probe=" + ctx.name(j), fmt("lambda", l), fmt("mu", m)}), d[j]);
    }
  }
  return tally.finish("def2_b", ctx.axiom_tol());
}

// Defect of a limit along a grid: the last value plus every increase on the
// way, so that passing forces a (numerically) decreasing sequence.
struct LimitRows {
  std::vector<std::vector<double>> defects;  // per probe, along the grid
};

LimitCheck limit_check(Context& ctx, const LimitRows& rows, const std::vector<double>& grid,
                       const char* key, const char* norm_id, const char* point_id, double tol) {
  Tally norm, point;
  LimitCheck out;
  for (Eigen::Index j = 0; j < ctx.count(); ++j) {
    const auto& d = rows.defects[static_cast<std::size_t>(j)];
    double rise = 0.0;
    for (std::size_t k = 1; k < d.size(); ++k) rise += std::max(0.0, d[k] - d[k - 1]);
    const double total = d.back() + rise;
    norm.add(join({"probe=" + ctx.name(j), fmt(key, grid.back()), fmt("increase", rise)}), total);
    point.add(join({"probe=" + ctx.name(j), fmt(key, grid.back())}), d.back());
    out.probe_pass.push_back(total <= tol);
  }
  out.norm = norm.finish(norm_id, tol);
  out.pointwise = point.finish(point_id, tol);
  return out;
}

LimitCheck strong_continuity(Context& ctx, const std::vector<double>& ts, double tol) {
  LimitRows rows;
  rows.defects.assign(static_cast<std::size_t>(ctx.count()), {});
  for (double t : ts) {
    const Vector d = column_abs_max(ctx.U(t) - ctx.f());
    for (Eigen::Index j = 0; j < ctx.count(); ++j) rows.defects[static_cast<std::size_t>(j)].push_back(d[j]);
  }
  return limit_check(ctx, rows, ts, "t", "def1_c", "def1_c_pointwise", tol);
}

LimitCheck yosida(Context& ctx, const std::vector<double>& lambdas, double tol) {
  LimitRows rows;
  rows.defects.assign(static_cast<std::size_t>(ctx.count()), {});
  for (double l : lambdas) {
    const Vector d = column_abs_max(l * ctx.R(l).value - ctx.f());
    for (Eigen::Index j = 0; j < ctx.count(); ++j) rows.defects[static_cast<std::size_t>(j)].push_back(d[j]);
  }
  return limit_check(ctx, rows, lambdas, "lambda", "def2_c", "def2_c_pointwise", tol);
}

double c0_defect(const Eigen::Ref<const Vector>& v, const StateSpace& space, const C0Tolerances& tols) {
  const C0Verdict verdict = c0_verdict(v, space, tols.decay, tols.continuity);
  return std::max(verdict.decay_defect / tols.decay, verdict.continuity_defect / tols.continuity);
}

CheckResult u_preservation(Context& ctx, const std::vector<double>& ts, const C0Tolerances& tols) {
  Tally tally;
  for (double t : ts) {
    const Matrix& g = ctx.U(t);
    for (Eigen::Index j = 0; j < ctx.count(); ++j)
      tally.add(join({"probe=" + ctx.name(j), fmt("t", t)}), c0_defect(g.col(j), ctx.fam().space(), tols));
  }
  return tally.finish("u_c0_preservation", 1.0);
}

CheckResult r_preservation(Context& ctx, const std::vector<double>& lambdas, const C0Tolerances& tols) {
  Tally tally;
  for (double l : lambdas) {
    const Matrix g = l * ctx.R(l).value;
    for (Eigen::Index j = 0; j < ctx.count(); ++j)
      tally.add(join({"probe=" + ctx.name(j), fmt("lambda", l)}), c0_defect(g.col(j), ctx.fam().space(), tols));
  }
  return tally.finish("r_c0_preservation", 1.0);
}

CheckResult lemma4(Context& ctx, const std::vector<double>& lambdas, const std::vector<double>& ts,
                   double slack) {
  Tally tally;
  std::vector<const Matrix*> blocks;
  for (double l : lambdas) blocks.push_back(&ctx.R(l).value);
  const Matrix stacked = hstack(blocks);
  for (double t : ts) {
    const Matrix moved = ctx.semigroup(t, stacked);
    for (std::size_t a = 0; a < lambdas.size(); ++a) {
      const double l = lambdas[a];
      const auto& r = ctx.R(l);
      const Vector lhs = column_abs_max(moved.middleCols(static_cast<Eigen::Index>(a) * ctx.count(), ctx.count()) - r.value);
      for (Eigen::Index j = 0; j < ctx.count(); ++j) {
        if (ctx.norm(j) == 0.0) continue;
        const double bound = (2.0 / l) * (-std::expm1(-l * t)) * ctx.norm(j);
        const double d = (lhs[j] - bound - 2.0 * r.error_estimate) / ctx.norm(j);
        tally.add(join({"probe=" + ctx.name(j), fmt("lambda", l), fmt("t", t)}), d);
      }
    }
  }
  return tally.finish("lemma4", slack);
}

CheckResult commutation(Context& ctx, const std::vector<double>& ts, const std::vector<double>& lambdas,
                        double tol) {
  // U_t R F, batched over lambda for each t, and R U_t F, batched over t for
  // each lambda.
  std::vector<const Matrix*> rblocks, ublocks;
  for (double l : lambdas) rblocks.push_back(&ctx.R(l).value);
  for (double t : ts) ublocks.push_back(&ctx.U(t));
  const Matrix rstack = hstack(rblocks), ustack = hstack(ublocks);
  std::vector<Matrix> ur, ru;
  for (double t : ts) ur.push_back(ctx.semigroup(t, rstack));
  for (double l : lambdas) ru.push_back(ctx.resolvent(l, ustack).value);
  Tally tally;
  const Eigen::Index m = ctx.count();
  for (std::size_t a = 0; a < ts.size(); ++a) {
    for (std::size_t b = 0; b < lambdas.size(); ++b) {
      const Matrix diff = ur[a].middleCols(static_cast<Eigen::Index>(b) * m, m) -
                          ru[b].middleCols(static_cast<Eigen::Index>(a) * m, m);
      const Vector d = column_abs_max(diff);
      for (Eigen::Index j = 0; j < m; ++j)
        tally.add(join({"probe=" + ctx.name(j), fmt("t", ts[a]), fmt("lambda", lambdas[b])}), d[j]);
    }
  }
  return tally.finish("commutation", tol);
}

CheckResult both(const std::string& id, const CheckResult& x, const CheckResult& y) {
  Tally tally;
  auto norm = [](const CheckResult& c) {
    if (c.aborted) return std::numeric_limits<double>::infinity();
    if (c.tolerance > 0.0) return c.max_defect / c.tolerance;
    return c.max_defect <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  };
  tally.add(x.id, norm(x));
  tally.add(y.id, norm(y));
  CheckResult r = tally.finish(id, 1.0);
  r.pass = x.pass && y.pass && !x.aborted && !y.aborted;
  return r;
}

CheckResult aborted(const std::string& id, double tolerance, const std::exception& e) {
  CheckResult r;
  r.id = id;
  r.pass = false;
  r.aborted = true;
  r.tolerance = tolerance;
  r.max_defect = std::numeric_limits<double>::quiet_NaN();
  r.witnesses.push_back({std::string("aborted: ") + e.what(), std::numeric_limits<double>::quiet_NaN()});
  return r;
}

}  // namespace

const CheckResult* FellerReport::find(const std::string& id) const {
  for (const auto& c : checks)
    if (c.id == id) return &c;
  return nullptr;
}

std::optional<bool> FellerReport::verdict() const {
  std::optional<bool> v;
  for (const char* id : {"thm_a", "thm_b", "thm_c", "thm_d", "thm_e", "thm_f"}) {
    const CheckResult* c = find(id);
    if (!c) return std::nullopt;
    if (v && *v != c->pass) return std::nullopt;
    v = c->pass;
  }
  return v;
}

std::vector<double> snap_times(const OperatorFamily& fam, std::vector<double> ts) {
  if (const auto step = fam.time_lattice()) {
    for (double& t : ts) t = std::max(1.0, std::round(t / *step)) * *step;
  }
  return descending(std::move(ts));
}

BatteryInputs prepare_inputs(const OperatorFamily& fam, const BatteryConfig& cfg) {
  require_grid(cfg.t_grid, "t");
  require_grid(cfg.lambda_grid, "lambda");
  if (!(cfg.decay_tol > 0.0)) throw std::invalid_argument("decay tolerance must be positive");
  if (cfg.continuity_tol && !(*cfg.continuity_tol > 0.0))
    throw std::invalid_argument("continuity tolerance must be positive");
  if (cfg.random_probes < 0) throw std::invalid_argument("random probe count must be >= 0");

  BatteryInputs in;
  in.t_grid = snap_times(fam, cfg.t_grid);
  in.lambda_grid = ascending(cfg.lambda_grid);
  auto all = standard_probes(fam.space_ptr(), cfg.seed, cfg.random_probes);
  in.lipschitz_scale = lipschitz_scale(all);
  in.c0.decay = cfg.decay_tol;
  if (cfg.continuity_tol)
    in.c0.continuity = *cfg.continuity_tol;
  else if (fam.space().has_coordinates())
    in.c0.continuity = cfg.continuity_factor * fam.space().spacing() * in.lipschitz_scale;
  else
    in.c0.continuity = 1.0;  // no neighbours, nothing to compare
  for (auto& p : all) {
    if (c0_verdict(p.f, in.c0.decay, in.c0.continuity).is_c0)
      in.probes.push_back(std::move(p));
    else
      in.excluded.push_back(p.name);
  }
  if (in.probes.empty()) throw std::invalid_argument("no probe passes the C0 test on this grid");
  return in;
}

std::vector<CheckResult> check_axioms(const OperatorFamily& fam, const std::vector<Probe>& probes,
                                      const std::vector<double>& t_grid,
                                      const std::vector<double>& lambda_grid,
                                      const BatteryConfig& cfg) {
  require_grid(t_grid, "t");
  require_grid(lambda_grid, "lambda");
  Context ctx(fam, probes, cfg);
  const auto ts = snap_times(fam, t_grid);
  const auto ls = ascending(lambda_grid);
  return {def1_a(ctx, ts), def1_b(ctx, ts), def2_a(ctx, ls), def2_b(ctx, ls)};
}

LimitCheck check_strong_continuity(const OperatorFamily& fam, const std::vector<Probe>& probes,
                                   const std::vector<double>& t_grid, const BatteryConfig& cfg) {
  require_grid(t_grid, "t");
  Context ctx(fam, probes, cfg);
  return strong_continuity(ctx, snap_times(fam, t_grid), cfg.limit_tol);
}

LimitCheck check_yosida(const OperatorFamily& fam, const std::vector<Probe>& probes,
                        const std::vector<double>& lambda_grid, const BatteryConfig& cfg) {
  require_grid(lambda_grid, "lambda");
  Context ctx(fam, probes, cfg);
  return yosida(ctx, ascending(lambda_grid), cfg.limit_tol);
}

std::pair<CheckResult, CheckResult> check_c0_preservation(
    const OperatorFamily& fam, const std::vector<Probe>& probes, const std::vector<double>& t_grid,
    const std::vector<double>& lambda_grid, const C0Tolerances& tols, const BatteryConfig& cfg) {
  require_grid(t_grid, "t");
  require_grid(lambda_grid, "lambda");
  for (const auto& p : probes)
    if (!c0_verdict(p.f, tols.decay, tols.continuity).is_c0)
      throw std::invalid_argument("probe '" + p.name + "' is not itself in C0");
  Context ctx(fam, probes, cfg);
  return {u_preservation(ctx, snap_times(fam, t_grid), tols),
          r_preservation(ctx, ascending(lambda_grid), tols)};
}

CheckResult check_lemma4_bound(const OperatorFamily& fam, const std::vector<double>& lambda_grid,
                               const std::vector<double>& t_grid, const std::vector<Probe>& probes,
                               const BatteryConfig& cfg) {
  require_grid(t_grid, "t");
  require_grid(lambda_grid, "lambda");
  Context ctx(fam, probes, cfg);
  return lemma4(ctx, ascending(lambda_grid), snap_times(fam, t_grid), cfg.lemma4_slack);
}

CheckResult check_commutation(const OperatorFamily& fam, const std::vector<Probe>& probes,
                              const std::vector<double>& t_grid,
                              const std::vector<double>& lambda_grid, const BatteryConfig& cfg) {
  require_grid(t_grid, "t");
  require_grid(lambda_grid, "lambda");
  Context ctx(fam, probes, cfg);
  return commutation(ctx, snap_times(fam, t_grid), ascending(lambda_grid), ctx.axiom_tol());
}

CheckResult check_density_rank(const OperatorFamily& fam, const std::vector<double>& lambda_grid,
                               const BatteryConfig& cfg) {
  const Generator* g = fam.generator();
  if (!g) throw std::invalid_argument("density rank check needs a generator backing");
  require_grid(lambda_grid, "lambda");
  Tally tally;
  const auto n = static_cast<Eigen::Index>(g->size());
  for (double l : ascending(lambda_grid)) {
    const Matrix a = l * Matrix::Identity(n, n) - g->matrix();
    const Eigen::PartialPivLU<Matrix> lu(a);
    const double rcond = lu.rcond();
    tally.add(join({fmt("lambda", l), fmt("rcond", rcond)}),
              rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity());
  }
  return tally.finish("density_rank", 1.0 / cfg.min_rcond);
}

FellerReport run_battery(const OperatorFamily& fam, const BatteryConfig& cfg,
                         const OperatorFamily* wider) {
  const BatteryInputs in = prepare_inputs(fam, cfg);
  Context ctx(fam, in.probes, cfg);

  FellerReport rep;
  rep.space = fam.space_ptr();
  rep.config = cfg;
  rep.t_grid = in.t_grid;
  rep.lambda_grid = in.lambda_grid;
  rep.c0 = in.c0;
  rep.lipschitz_scale = in.lipschitz_scale;
  rep.axiom_tol = ctx.axiom_tol();
  for (const auto& p : in.probes) rep.probes.push_back(p.name);
  rep.excluded_probes = in.excluded;

  const auto& ts = in.t_grid;
  const auto& ls = in.lambda_grid;
  auto guarded = [&](const std::string& id, double tol, const std::function<CheckResult()>& run) {
    try {
      return run();
    } catch (const std::exception& e) {
      rep.complete = false;
      return aborted(id, tol, e);
    }
  };

  const CheckResult d1a = guarded("def1_a", rep.axiom_tol, [&] { return def1_a(ctx, ts); });
  const CheckResult d1b = guarded("def1_b", rep.axiom_tol, [&] { return def1_b(ctx, ts); });
  LimitCheck cont, yos;
  try {
    cont = strong_continuity(ctx, ts, cfg.limit_tol);
  } catch (const std::exception& e) {
    rep.complete = false;
    cont.norm = aborted("def1_c", cfg.limit_tol, e);
    cont.pointwise = aborted("def1_c_pointwise", cfg.limit_tol, e);
  }
  const CheckResult d2a = guarded("def2_a", rep.axiom_tol, [&] { return def2_a(ctx, ls); });
  const CheckResult d2b = guarded("def2_b", rep.axiom_tol, [&] { return def2_b(ctx, ls); });
  try {
    yos = yosida(ctx, ls, cfg.limit_tol);
  } catch (const std::exception& e) {
    rep.complete = false;
    yos.norm = aborted("def2_c", cfg.limit_tol, e);
    yos.pointwise = aborted("def2_c_pointwise", cfg.limit_tol, e);
  }

  // lemma3 as an implication over probes: t-continuity passing must come
  // with the Yosida limit passing.
  CheckResult l3;
  if (cont.probe_pass.size() == yos.probe_pass.size() && !cont.probe_pass.empty()) {
    Tally tally;
    double count = 0.0;
    for (std::size_t j = 0; j < cont.probe_pass.size(); ++j) {
      if (cont.probe_pass[j] && !yos.probe_pass[j]) {
        count += 1.0;
        tally.add("probe=" + in.probes[j].name, 1.0);
      }
    }
    l3 = tally.finish("lemma3", 0.0);
    l3.max_defect = count;
    l3.pass = count == 0.0;
  } else {
    rep.complete = false;
    l3 = aborted("lemma3", 0.0, std::runtime_error("limit checks did not complete"));
  }

  const CheckResult l4 = guarded("lemma4", cfg.lemma4_slack,
                                 [&] { return lemma4(ctx, ls, ts, cfg.lemma4_slack); });
  const CheckResult comm = guarded("commutation", rep.axiom_tol,
                                   [&] { return commutation(ctx, ts, ls, rep.axiom_tol); });
  const CheckResult upres = guarded("u_c0_preservation", 1.0, [&] { return u_preservation(ctx, ts, in.c0); });
  const CheckResult rpres = guarded("r_c0_preservation", 1.0, [&] { return r_preservation(ctx, ls, in.c0); });

  rep.checks = {d1a, d1b, cont.norm, cont.pointwise, d2a, d2b, yos.norm, yos.pointwise, l3, l4, comm};
  if (fam.has_exact_resolvent())
    rep.checks.push_back(guarded("density_rank", 1.0 / cfg.min_rcond,
                                 [&] { return check_density_rank(fam, ls, cfg); }));
  rep.checks.push_back(upres);
  rep.checks.push_back(rpres);
  rep.checks.push_back(both("thm_a", upres, cont.norm));
  rep.checks.push_back(both("thm_b", rpres, yos.norm));
  rep.checks.push_back(both("thm_c", upres, cont.pointwise));
  rep.checks.push_back(both("thm_d", upres, yos.pointwise));
  rep.checks.push_back(both("thm_e", rpres, cont.pointwise));
  rep.checks.push_back(both("thm_f", rpres, yos.pointwise));
  rep.equivalence_consistent = rep.verdict().has_value();

  if (fam.space().has_coordinates()) {
    rep.truncation.push_back({fam.space().half_width(), upres.max_defect, rpres.max_defect});
    if (wider) {
      // The wider window repeats only the preservation checks, with the
      // resolvent at the smallest lambda (the one that sees furthest).
      try {
        BatteryConfig wcfg = cfg;
        wcfg.continuity_tol = in.c0.continuity;
        const BatteryInputs win = prepare_inputs(*wider, wcfg);
        Context wctx(*wider, win.probes, wcfg);
        const auto wts = snap_times(*wider, cfg.t_grid);
        rep.truncation.push_back({wider->space().half_width(),
                                  u_preservation(wctx, wts, win.c0).max_defect,
                                  r_preservation(wctx, {ls.front()}, win.c0).max_defect});
      } catch (const std::exception&) {
        rep.complete = false;
      }
    }
  }
  return rep;
}

void set_expected(FellerReport& report, std::optional<bool> expected_feller) {
  report.expected_feller = expected_feller;
  const auto v = report.verdict();
  report.verdict_matches_expected = v && expected_feller && *v == *expected_feller;
}

}  // namespace feller
