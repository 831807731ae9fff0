#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "psi/errors.hpp"
#include "psi/io.hpp"
#include "psi/psi_solver.hpp"

using namespace psi;

namespace {

const std::filesystem::path kData = PSI_TEST_DATA_DIR;

std::string error_of(const std::string& text) {
  try {
    parse_problem(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

const char* kMinimal = R"({
  "nodes": [[0, 0], [1, 0]],
  "elements": [[0, 1, 1e-4]],
  "material": {"type": "linear", "Y0": 2e11},
  "bcs": [{"node": 0, "dof": 0, "value": 0}, {"node": 0, "dof": 1, "value": 0}, {"node": 1, "dof": 1, "value": 0}],
  "forces": [{"node": 1, "dof": 0, "value": 100}]
})";

}  // namespace

TEST_CASE("minimal problem with defaults") {
  const auto d = parse_problem(kMinimal);
  CHECK(d.dim == 2);
  CHECK(d.nodes.size() == 2);
  CHECK(d.elements[0] == BarElement{0, 1, 1e-4});
  CHECK(d.material.type == LawType::Linear);
  CHECK(d.material.y0 == 2e11);
  CHECK(d.bcs.size() == 3);
  CHECK(d.forces[0] == NodalValue{1, 0, 100.0});
  CHECK(d.solver.c_over_y0 == 0.3);
  CHECK(d.solver.tol1 == 5e-2);
  CHECK(d.nr.damping == 0.8);
  CHECK_NOTHROW(TrussProblem{d});
}

TEST_CASE("problem round trip") {
  auto d = fixtures::desk_truss();
  d.solver.c_over_y0 = 0.7;
  d.solver.tol2 = 1e-4;
  d.solver.pd.method = PdMethod::SecantEL;
  d.solver.workers = 3;
  d.nr.damping = 0.6;
  const auto back = parse_problem(serialize_problem(d));
  CHECK(back.nodes == d.nodes);
  CHECK(back.elements == d.elements);
  CHECK(back.bcs == d.bcs);
  CHECK(back.forces == d.forces);
  CHECK(back.material.type == d.material.type);
  CHECK(back.material.y0 == d.material.y0);
  CHECK(back.material.p == d.material.p);
  CHECK(back.solver.c_over_y0 == 0.7);
  CHECK(back.solver.tol2 == 1e-4);
  CHECK(back.solver.pd.method == PdMethod::SecantEL);
  CHECK(back.solver.workers == 3);
  CHECK(back.nr.damping == 0.6);
  CHECK(serialize_problem(back) == serialize_problem(d));
}

TEST_CASE("problem errors name the location") {
  CHECK(error_of("{\"nodes\": [[0, 0]], ").find("parse error at byte") != std::string::npos);
  std::string bad = kMinimal;
  bad.replace(bad.find("\"linear\""), 8, "\"rubber\"");
  CHECK(error_of(bad).find("material.type") != std::string::npos);
  bad = kMinimal;
  bad.replace(bad.find("\"forces\""), 8, "\"force\"");
  CHECK(error_of(bad).find("force") != std::string::npos);
  bad = kMinimal;
  bad.replace(bad.find("[0, 1, 1e-4]"), 12, "[0, 1]");
  CHECK(error_of(bad).find("elements[0]") != std::string::npos);
  bad = kMinimal;
  bad.replace(bad.find("\"dof\": 1, \"value\": 0}, {\"node\": 1"), 8, "\"dof\": 7");
  try {
    TrussProblem{parse_problem(bad)};
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("bcs[1]") != std::string::npos);
  }
  CHECK_THROWS_AS(load_problem(kData / "malformed.json"), ValidationError);
  try {
    load_problem(kData / "bad_node.json");
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("999") != std::string::npos);
  }
  CHECK_THROWS_AS(load_problem(kData / "does_not_exist.json"), Error);
}

TEST_CASE("neural material resolves weights relative to the problem file") {
  std::string text = kMinimal;
  text.replace(text.find("{\"type\": \"linear\", \"Y0\": 2e11}"), 30,
               "{\"type\": \"neural\", \"weights_path\": \"mlp_power_law.json\"}");
  const auto d = parse_problem(text);
  CHECK(d.material.type == LawType::Neural);
  CHECK(d.material.weights_path == "mlp_power_law.json");
  const auto law = make_law(d.material, kData);
  CHECK(law->name() == "neural");
  CHECK_THROWS_AS(make_law(d.material, kData / "nowhere"), Error);
  std::string missing = kMinimal;
  missing.replace(missing.find("{\"type\": \"linear\", \"Y0\": 2e11}"), 30, "{\"type\": \"neural\"}");
  CHECK(error_of(missing).find("weights_path") != std::string::npos);
}

TEST_CASE("results round trip and trace") {
  const TrussProblem p(fixtures::desk_truss());
  const PowerLaw law(2e11, 1e-4);
  const auto sol = psi_solve(p, law, SolverConfig{});
  const std::string text = serialize_results(sol);
  CHECK(text.find("t_pe_ms") == std::string::npos);
  const auto back = parse_results(text);
  CHECK(back.solver == "psi");
  CHECK(back.stop_reason == sol.stop_reason);
  CHECK(back.iterations() == sol.iterations());
  CHECK(back.displacements == sol.displacements);
  CHECK(back.states == sol.states);
  CHECK(back.reactions == sol.reactions);
  CHECK(back.final_residual() == sol.final_residual());
  CHECK(serialize_results(back) == text);

  std::ostringstream csv;
  write_trace_csv(csv, sol);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "iter,residual_rel,ps_step_rel,t_pe_ms,t_pd_ms");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == sol.iterations());

  const auto dir = std::filesystem::temp_directory_path() / "psi_io_test";
  std::filesystem::create_directories(dir);
  save_results(dir / "r.json", sol);
  CHECK(load_results(dir / "r.json").displacements == sol.displacements);
  std::filesystem::remove_all(dir);
}

TEST_CASE("stop reason names") {
  for (auto r : {StopReason::ForceResidual, StopReason::PhaseSpaceStep, StopReason::MaxIter})
    CHECK(parse_stop_reason(to_string(r)) == r);
  CHECK_THROWS_AS(parse_stop_reason("done"), ValidationError);
}

TEST_CASE("an unbounded first step survives the round trip") {
  Solution s;
  s.solver = "psi";
  s.stop_reason = StopReason::ForceResidual;
  s.trace.push_back({1, 0.5, std::numeric_limits<double>::infinity(), 0.0, 0.0});
  const auto text = serialize_results(s);
  CHECK(text.find("null") != std::string::npos);
  const auto back = parse_results(text);
  CHECK(std::isinf(back.trace[0].ps_step_rel));
  CHECK(back.trace[0].residual_rel == 0.5);
}
