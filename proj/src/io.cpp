#include "psi/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "psi/errors.hpp"

namespace psi {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ValidationError(where + ": " + what); }

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(where.empty() ? key : where + "." + key, "unknown key");
  }
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

std::size_t as_index(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected a non-negative integer");
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  const auto v = j.get<long long>();
  if (v < 0) fail(where, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

const json& require(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) fail(where.empty() ? key : where + "." + key, "missing");
  return *it;
}

std::vector<NodalValue> parse_nodal(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  std::vector<NodalValue> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    const auto& item = j[i];
    if (!item.is_object()) fail(at, "expected an object with node, dof, value");
    only_keys(item, at, {"node", "dof", "value"});
    out.push_back({as_index(require(item, "node", at), at + ".node"), as_int(require(item, "dof", at), at + ".dof"),
                   as_number(require(item, "value", at), at + ".value")});
  }
  return out;
}

json nodal_json(const std::vector<NodalValue>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back({{"node", v.node}, {"dof", v.dof}, {"value", v.value}});
  return out;
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

}  // namespace

TrussDescription parse_problem(const std::string& text) {
  const json j = parse_text(text);
  if (!j.is_object()) fail("(top level)", "expected an object");
  only_keys(j, "", {"dim", "nodes", "elements", "material", "bcs", "forces", "solver", "nr"});
  TrussDescription d;

  const auto& nodes = require(j, "nodes", "");
  if (!nodes.is_array() || nodes.empty()) fail("nodes", "expected a non-empty array");
  std::size_t width = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string at = "nodes[" + std::to_string(i) + "]";
    const auto& n = nodes[i];
    if (!n.is_array() || n.size() < 2 || n.size() > 3) fail(at, "expected [x, y] or [x, y, z]");
    if (i == 0) width = n.size();
    if (n.size() != width) fail(at, "has " + std::to_string(n.size()) + " coordinates, nodes[0] has " +
                                        std::to_string(width));
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < n.size(); ++k) x[k] = as_number(n[k], at + "[" + std::to_string(k) + "]");
    d.nodes.push_back(x);
  }
  d.dim = static_cast<int>(width);
  if (const auto it = j.find("dim"); it != j.end()) {
    d.dim = as_int(*it, "dim");
    if (d.dim != static_cast<int>(width)) fail("dim", "does not match the node coordinate count");
  }

  const auto& elements = require(j, "elements", "");
  if (!elements.is_array()) fail("elements", "expected an array");
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const std::string at = "elements[" + std::to_string(i) + "]";
    const auto& e = elements[i];
    if (!e.is_array() || e.size() != 3) fail(at, "expected [node_a, node_b, area]");
    d.elements.push_back({as_index(e[0], at + "[0]"), as_index(e[1], at + "[1]"), as_number(e[2], at + "[2]")});
  }

  const auto& mat = require(j, "material", "");
  if (!mat.is_object()) fail("material", "expected an object");
  only_keys(mat, "material", {"type", "Y0", "p", "k", "weights_path"});
  const auto& type = require(mat, "type", "material");
  if (!type.is_string()) fail("material.type", "expected a string");
  d.material.type = parse_law_type(type.get<std::string>());
  if (d.material.type != LawType::Neural) d.material.y0 = as_number(require(mat, "Y0", "material"), "material.Y0");
  if (d.material.type == LawType::Power) d.material.p = as_number(require(mat, "p", "material"), "material.p");
  if (d.material.type == LawType::Quadratic) d.material.k = as_number(require(mat, "k", "material"), "material.k");
  if (const auto it = mat.find("weights_path"); it != mat.end()) {
    if (!it->is_string()) fail("material.weights_path", "expected a string");
    d.material.weights_path = it->get<std::string>();
  }
  if (d.material.type == LawType::Neural && d.material.weights_path.empty())
    fail("material.weights_path", "required for the neural law");

  if (const auto it = j.find("bcs"); it != j.end()) d.bcs = parse_nodal(*it, "bcs");
  if (const auto it = j.find("forces"); it != j.end()) d.forces = parse_nodal(*it, "forces");

  if (const auto it = j.find("solver"); it != j.end()) {
    const auto& s = *it;
    if (!s.is_object()) fail("solver", "expected an object");
    only_keys(s, "solver", {"c_over_y0", "tol1", "tol2", "max_iter", "pd_method", "strain_floor", "scan_points",
                            "pd_max_iter", "workers"});
    auto& c = d.solver;
    if (s.contains("c_over_y0")) c.c_over_y0 = as_number(s["c_over_y0"], "solver.c_over_y0");
    if (s.contains("tol1")) c.tol1 = as_number(s["tol1"], "solver.tol1");
    if (s.contains("tol2")) c.tol2 = as_number(s["tol2"], "solver.tol2");
    if (s.contains("max_iter")) c.max_iter = as_int(s["max_iter"], "solver.max_iter");
    if (s.contains("pd_method")) {
      if (!s["pd_method"].is_string()) fail("solver.pd_method", "expected a string");
      try {
        c.pd.method = parse_pd_method(s["pd_method"].get<std::string>());
      } catch (const ValidationError& e) {
        fail("solver.pd_method", e.what());
      }
    }
    if (s.contains("strain_floor")) c.pd.strain_floor = as_number(s["strain_floor"], "solver.strain_floor");
    if (s.contains("scan_points")) c.pd.scan_points = as_int(s["scan_points"], "solver.scan_points");
    if (s.contains("pd_max_iter")) c.pd.max_iter = as_int(s["pd_max_iter"], "solver.pd_max_iter");
    if (s.contains("workers")) {
      const int w = as_int(s["workers"], "solver.workers");
      if (w < 1) fail("solver.workers", "must be >= 1");
      c.workers = static_cast<unsigned>(w);
    }
  }
  if (const auto it = j.find("nr"); it != j.end()) {
    const auto& s = *it;
    if (!s.is_object()) fail("nr", "expected an object");
    only_keys(s, "nr", {"damping", "tol", "max_iter"});
    if (s.contains("damping")) d.nr.damping = as_number(s["damping"], "nr.damping");
    if (s.contains("tol")) d.nr.tol = as_number(s["tol"], "nr.tol");
    if (s.contains("max_iter")) d.nr.max_iter = as_int(s["max_iter"], "nr.max_iter");
  }
  return d;
}

TrussDescription load_problem_description(const std::filesystem::path& path) {
  try {
    return parse_problem(read_text_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

TrussProblem load_problem(const std::filesystem::path& path) {
  auto d = load_problem_description(path);
  try {
    return TrussProblem(std::move(d));
  } catch (const Error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string serialize_problem(const TrussDescription& d) {
  json j;
  j["dim"] = d.dim;
  j["nodes"] = json::array();
  for (const auto& n : d.nodes) {
    json row = json::array();
    for (int k = 0; k < d.dim; ++k) row.push_back(n[static_cast<std::size_t>(k)]);
    j["nodes"].push_back(row);
  }
  j["elements"] = json::array();
  for (const auto& e : d.elements) j["elements"].push_back({e.node_a, e.node_b, e.area});
  json mat{{"type", std::string(to_string(d.material.type))}};
  if (d.material.type != LawType::Neural) mat["Y0"] = d.material.y0;
  if (d.material.type == LawType::Power) mat["p"] = d.material.p;
  if (d.material.type == LawType::Quadratic) mat["k"] = d.material.k;
  if (!d.material.weights_path.empty()) mat["weights_path"] = d.material.weights_path;
  j["material"] = mat;
  j["bcs"] = nodal_json(d.bcs);
  j["forces"] = nodal_json(d.forces);
  json s{{"c_over_y0", d.solver.c_over_y0},
         {"tol1", d.solver.tol1},
         {"max_iter", d.solver.max_iter},
         {"pd_method", std::string(to_string(d.solver.pd.method))},
         {"strain_floor", d.solver.pd.strain_floor},
         {"scan_points", d.solver.pd.scan_points},
         {"pd_max_iter", d.solver.pd.max_iter},
         {"workers", d.solver.workers}};
  if (d.solver.tol2) s["tol2"] = *d.solver.tol2;
  j["solver"] = s;
  j["nr"] = {{"damping", d.nr.damping}, {"tol", d.nr.tol}, {"max_iter", d.nr.max_iter}};
  return j.dump(2) + "\n";
}

void save_problem(const std::filesystem::path& path, const TrussDescription& description) {
  write_text_file(path, serialize_problem(description));
}

std::string serialize_results(const Solution& s) {
  json j;
  j["solver"] = s.solver;
  j["converged"] = s.converged();
  j["stop_reason"] = std::string(to_string(s.stop_reason));
  j["iterations"] = s.iterations();
  j["initial_residual"] = s.initial_residual;
  j["final_residual"] = s.final_residual();
  j["displacements"] = s.displacements;
  j["strains"] = s.states.strains();
  j["stresses"] = s.states.stresses();
  j["reactions"] = nodal_json(s.reactions);
  json trace = json::array();
  // a step measured from the zero point is unbounded; JSON has no infinity
  const auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  for (const auto& r : s.trace)
    trace.push_back({{"iter", r.iter},
                     {"residual_rel", finite_or_null(r.residual_rel)},
                     {"ps_step_rel", finite_or_null(r.ps_step_rel)}});
  j["trace"] = trace;
  return j.dump(2) + "\n";
}

void save_results(const std::filesystem::path& path, const Solution& solution) {
  write_text_file(path, serialize_results(solution));
}

Solution parse_results(const std::string& text) {
  const json j = parse_text(text);
  if (!j.is_object()) fail("(top level)", "expected an object");
  Solution s;
  try {
    s.solver = j.at("solver").get<std::string>();
    s.stop_reason = parse_stop_reason(j.at("stop_reason").get<std::string>());
    s.initial_residual = j.at("initial_residual").get<double>();
    s.displacements = j.at("displacements").get<std::vector<double>>();
    const auto eps = j.at("strains").get<std::vector<double>>();
    const auto sig = j.at("stresses").get<std::vector<double>>();
    if (eps.size() != sig.size()) fail("stresses", "length differs from strains");
    std::vector<ElementState> states(eps.size());
    for (std::size_t e = 0; e < eps.size(); ++e) states[e] = {eps[e], sig[e]};
    s.states = PhasePoint(std::move(states));
    s.reactions = parse_nodal(j.at("reactions"), "reactions");
    const auto number_or_inf = [](const json& v) {
      return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
    };
    for (const auto& r : j.at("trace"))
      s.trace.push_back({r.at("iter").get<int>(), number_or_inf(r.at("residual_rel")),
                         number_or_inf(r.at("ps_step_rel")), 0.0, 0.0});
  } catch (const json::exception& e) {
    throw ValidationError(std::string("results: ") + e.what());
  }
  return s;
}

Solution load_results(const std::filesystem::path& path) { return parse_results(read_text_file(path)); }

void write_trace_csv(std::ostream& out, const Solution& solution) {
  out << "iter,residual_rel,ps_step_rel,t_pe_ms,t_pd_ms\n";
  char buf[160];
  for (const auto& r : solution.trace) {
    std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.6f,%.6f\n", r.iter, r.residual_rel, r.ps_step_rel, r.t_pe_ms,
                  r.t_pd_ms);
    out << buf;
  }
}

void save_trace_csv(const std::filesystem::path& path, const Solution& solution) {
  std::ostringstream s;
  write_trace_csv(s, solution);
  write_text_file(path, s.str());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.string() + ": cannot open file");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(path.string() + ": cannot open file for writing");
  out << text;
  if (!out) throw ValidationError(path.string() + ": write failed");
}

}  // namespace psi
