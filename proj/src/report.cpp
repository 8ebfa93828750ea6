#include "feller/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace feller {

namespace {

void write(std::ostringstream& os, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) { os << "{}"; break; }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << Json(it.key()).dump() << ": ";
        write(os, it.value(), indent, depth + 1);
      }
      os << '\n' << close << '}';
      break;
    }
    case Json::value_t::array: {
      if (j.empty()) { os << "[]"; break; }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write(os, j[i], indent, depth + 1);
      }
      os << '\n' << close << ']';
      break;
    }
    case Json::value_t::number_float:
      os << format_number(j.get<double>());
      break;
    default:
      os << j.dump();
  }
}

Json number(double v) {
  return std::isfinite(v) ? Json(v) : Json(nullptr);
}

Json numbers(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

}  // namespace

std::string format_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  // Keep integral values recognisably floating point.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string dump_json(const Json& j, int indent) {
  std::ostringstream os;
  write(os, j, indent, 0);
  os << '\n';
  return os.str();
}

Json report_to_json(const FellerReport& r) {
  Json j;
  j["process"] = r.process;
  Json params = Json::object();
  for (const auto& [k, v] : r.parameters) params[k] = number(v);
  j["parameters"] = params;

  Json grid;
  const StateSpace& s = *r.space;
  grid["points"] = s.size();
  grid["has_coordinates"] = s.has_coordinates();
  grid["spacing"] = number(s.spacing());
  grid["half_width"] = s.has_coordinates() ? number(s.half_width()) : Json(nullptr);
  grid["boundary_band"] = s.boundary_band();
  grid["t_grid"] = numbers(r.t_grid);
  grid["lambda_grid"] = numbers(r.lambda_grid);
  Json trunc = Json::array();
  for (const auto& t : r.truncation) {
    Json row;
    row["L"] = number(t.half_width);
    row["u_c0_defect"] = number(t.u_c0_defect);
    row["r_c0_defect"] = number(t.r_c0_defect);
    trunc.push_back(row);
  }
  grid["truncation"] = trunc;
  j["grid"] = grid;

  Json cfg;
  cfg["seed"] = r.config.seed;
  cfg["random_probes"] = r.config.random_probes;
  cfg["decay_tol"] = number(r.c0.decay);
  cfg["continuity_tol"] = number(r.c0.continuity);
  cfg["continuity_factor"] = number(r.config.continuity_factor);
  cfg["lipschitz_scale"] = number(r.lipschitz_scale);
  cfg["axiom_tol"] = number(r.axiom_tol);
  cfg["lemma4_slack"] = number(r.config.lemma4_slack);
  cfg["limit_tol"] = number(r.config.limit_tol);
  cfg["min_rcond"] = number(r.config.min_rcond);
  cfg["quadrature_nodes"] = r.config.quadrature_nodes;
  cfg["probes"] = r.probes;
  cfg["excluded_probes"] = r.excluded_probes;
  cfg["complete"] = r.complete;
  j["config"] = cfg;

  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json row;
    row["id"] = c.id;
    row["pass"] = c.pass;
    row["max_defect"] = number(c.max_defect);
    row["tolerance"] = number(c.tolerance);
    Json w = Json::array();
    for (const auto& x : c.witnesses) {
      Json e;
      e["input"] = x.input;
      e["defect"] = number(x.defect);
      w.push_back(e);
    }
    row["witnesses"] = w;
    checks.push_back(row);
  }
  j["checks"] = checks;
  j["equivalence_consistent"] = r.equivalence_consistent;
  j["expected_feller"] = r.expected_feller ? Json(*r.expected_feller) : Json(nullptr);
  j["verdict_matches_expected"] = r.verdict_matches_expected;
  return j;
}

std::string report_to_csv(const FellerReport& r) {
  std::string out = "id,pass,max_defect,tolerance\n";
  for (const auto& c : r.checks)
    out += c.id + "," + (c.pass ? "true" : "false") + "," + format_number(c.max_defect) + "," +
           format_number(c.tolerance) + "\n";
  return out;
}

}  // namespace feller
