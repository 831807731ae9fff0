// psi: command-line front end for the phase-space iteration solver.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "psi/analysis.hpp"
#include "psi/errors.hpp"
#include "psi/io.hpp"
#include "psi/nr_solver.hpp"
#include "psi/projection_d.hpp"
#include "psi/psi_solver.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitMaxIter = 2;

unsigned default_workers() {
  if (const char* env = std::getenv("PSI_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
    std::cerr << "warning: ignoring PSI_WORKERS='" << env << "'\n";
  }
  return 1;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double rel_l2_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

void write_iterates_csv(const fs::path& path, const psi::Solution& sol) {
  std::ostringstream out;
  out << "iter,stage,element,strain,stress\n";
  char buf[128];
  for (std::size_t n = 0; n < sol.d_iterates.size(); ++n) {
    if (n > 0) {
      const auto& e = sol.e_iterates[n - 1];
      for (std::size_t k = 0; k < e.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,E,%zu,%.12g,%.12g\n", n, k, e[k].strain, e[k].stress);
        out << buf;
      }
    }
    const auto& d = sol.d_iterates[n];
    for (std::size_t k = 0; k < d.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%zu,D,%zu,%.12g,%.12g\n", n, k, d[k].strain, d[k].stress);
      out << buf;
    }
  }
  psi::write_text_file(path, out.str());
}

psi::TrussProblem build_problem(psi::TrussDescription desc, const std::string& path) {
  try {
    return psi::TrussProblem(std::move(desc));
  } catch (const psi::Error& e) {
    throw psi::ValidationError(path + ": " + e.what());
  }
}

struct SolveArgs {
  std::string problem;
  std::string method = "psi";
  std::optional<double> c_over_y0, tol1, tol2;
  std::optional<int> max_iter;
  std::optional<std::string> pd_method;
  unsigned workers = 0;
  std::string out, trace, iterates;
};

void apply_overrides(psi::TrussDescription& d, const SolveArgs& a) {
  if (a.c_over_y0) d.solver.c_over_y0 = *a.c_over_y0;
  if (a.tol1) {
    d.solver.tol1 = *a.tol1;
    d.nr.tol = *a.tol1;
  }
  if (a.tol2) d.solver.tol2 = *a.tol2;
  if (a.max_iter) {
    d.solver.max_iter = *a.max_iter;
    d.nr.max_iter = *a.max_iter;
  }
  if (a.pd_method) d.solver.pd.method = psi::parse_pd_method(*a.pd_method);
  d.solver.workers = a.workers > 0 ? a.workers : std::max(d.solver.workers, default_workers());
}

int run_solve(const SolveArgs& a) {
  auto desc = psi::load_problem_description(a.problem);
  apply_overrides(desc, a);
  const psi::TrussProblem problem = build_problem(desc, a.problem);
  const auto law = psi::make_law(desc.material, fs::path(a.problem).parent_path());
  psi::Solution sol;
  if (a.method == "psi") {
    auto cfg = desc.solver;
    cfg.record_iterates = !a.iterates.empty();
    sol = psi::psi_solve(problem, *law, cfg);
  } else if (a.method == "nr") {
    sol = psi::nr_solve(problem, *law, desc.nr);
  } else {
    throw psi::ValidationError("--method: expected psi or nr, got '" + a.method + "'");
  }
  if (!a.out.empty()) psi::save_results(a.out, sol);
  if (!a.trace.empty()) psi::save_trace_csv(a.trace, sol);
  if (!a.iterates.empty() && a.method == "psi") write_iterates_csv(a.iterates, sol);
  std::cout << "solver=" << sol.solver << " stop=" << psi::to_string(sol.stop_reason)
            << " iterations=" << sol.iterations() << " residual=" << fmt(sol.final_residual()) << "\n";
  return sol.converged() ? kExitOk : kExitMaxIter;
}

int run_compare(const std::string& problem_path, const std::string& out, unsigned workers) {
  auto desc = psi::load_problem_description(problem_path);
  desc.solver.workers = workers > 0 ? workers : std::max(desc.solver.workers, default_workers());
  const psi::TrussProblem problem = build_problem(desc, problem_path);
  const auto law = psi::make_law(desc.material, fs::path(problem_path).parent_path());

  using Clock = std::chrono::steady_clock;
  auto t0 = Clock::now();
  const auto ps = psi::psi_solve(problem, *law, desc.solver);
  const double t_psi = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  t0 = Clock::now();
  const auto nr = psi::nr_solve(problem, *law, desc.nr);
  const double t_nr = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  const double diff = rel_l2_diff(ps.displacements, nr.displacements);

  std::ostringstream csv;
  csv << "solver,iterations,converged,stop_reason,final_residual,time_ms,t_pe_ms,t_pd_ms,disp_rel_l2_diff\n";
  for (const auto* s : {&ps, &nr}) {
    double pe = 0.0, pd = 0.0;
    for (const auto& r : s->trace) {
      pe += r.t_pe_ms;
      pd += r.t_pd_ms;
    }
    csv << s->solver << ',' << s->iterations() << ',' << (s->converged() ? 1 : 0) << ','
        << psi::to_string(s->stop_reason) << ',' << fmt(s->final_residual()) << ','
        << fmt(s == &ps ? t_psi : t_nr) << ',' << fmt(pe) << ',' << fmt(pd) << ',' << fmt(diff) << '\n';
  }
  if (!out.empty()) psi::write_text_file(out, csv.str());
  std::cout << csv.str();
  return ps.converged() && nr.converged() ? kExitOk : kExitMaxIter;
}

int run_rate(double y, double c, int ne, double len_ratio, int iters) {
  if (ne < 1) throw psi::ValidationError("--ne must be >= 1");
  if (!(len_ratio >= 1.0)) throw psi::ValidationError("--len-ratio must be >= 1");
  std::vector<double> lengths(static_cast<std::size_t>(ne), 1.0);
  for (int i = 0; i < ne; ++i)
    lengths[static_cast<std::size_t>(i)] = ne == 1 ? 1.0 : 1.0 + (len_ratio - 1.0) * i / (ne - 1);
  psi::MaterialSpec mat;
  mat.type = psi::LawType::Linear;
  mat.y0 = y;
  const psi::TrussProblem problem(psi::serial_bar_chain(lengths, 1.0, 1.0, mat));
  const psi::LinearLaw law(y);
  psi::SolverConfig cfg;
  cfg.c_over_y0 = c / y;
  cfg.tol1 = 1e-300;
  cfg.tol2 = 1e-300;
  cfg.max_iter = iters;
  cfg.record_iterates = true;
  const auto sol = psi::psi_solve(problem, law, cfg);

  const psi::Metric metric(c, std::vector<double>(problem.volumes().begin(), problem.volumes().end()));
  const psi::PhasePoint star(std::vector<psi::ElementState>(problem.num_elements(), {1.0 / y, 1.0}));
  std::vector<double> errors;
  std::cout << "n,error,beta_hat,friedrichs\n";
  for (std::size_t n = 1; n < sol.d_iterates.size(); ++n) {
    errors.push_back(psi::ps_distance(sol.d_iterates[n], star, metric));
    std::string beta;
    try {
      beta = fmt(psi::estimate_rate(errors).beta_hat);
    } catch (const std::invalid_argument&) {
    }
    std::cout << n << ',' << fmt(errors.back()) << ',' << beta << ',' << fmt(psi::friedrichs_rate(y, c)) << '\n';
  }
  return kExitOk;
}

int run_analyze_1d(double y, double c, double f_over_a, int iters) {
  std::cout << "check,parameter,value,reference,pass\n";
  bool ok = true;
  const auto row = [&](const std::string& check, const std::string& param, double value, double ref, bool pass) {
    ok = ok && pass;
    std::cout << check << ',' << param << ',' << fmt(value) << ',' << fmt(ref) << ',' << (pass ? 1 : 0) << '\n';
  };

  // PSI on one linear bar against the explicit iterate
  psi::MaterialSpec mat;
  mat.y0 = y;
  const std::vector<double> one{1.0};
  const psi::TrussProblem bar(psi::serial_bar_chain(one, 1.0, f_over_a, mat));
  const psi::LinearLaw lin(y);
  psi::SolverConfig cfg;
  cfg.c_over_y0 = c / y;
  cfg.tol1 = 1e-300;
  cfg.tol2 = 1e-300;
  cfg.max_iter = iters;
  cfg.record_iterates = true;
  const auto sol = psi::psi_solve(bar, lin, cfg);
  double worst = 0.0;
  for (std::size_t n = 0; n < sol.d_iterates.size(); ++n) {
    const auto ref = psi::closed_form_iterate(y, c, f_over_a, 0.0, 0.0, static_cast<int>(n));
    const auto& z = sol.d_iterates[n][0];
    worst = std::max({worst, std::abs(z.strain - ref.strain) / std::max(std::abs(ref.strain), 1e-300),
                      std::abs(z.stress - ref.stress) / std::max(std::abs(ref.stress), 1e-300)});
  }
  row("closed_form", "max_rel_dev", worst, 1e-12, worst <= 1e-12 || sol.d_iterates.size() < 2);

  const double beta = psi::friedrichs_rate(y, c);
  std::vector<double> errs;
  const psi::Metric metric(c, {1.0});
  const psi::PhasePoint star(std::vector<psi::ElementState>{{f_over_a / y, f_over_a}});
  for (std::size_t n = 1; n < sol.d_iterates.size() && n <= 30; ++n) {
    const double e = psi::ps_distance(sol.d_iterates[n], star, metric);
    if (e <= 1e-9 * psi::ps_norm(star, metric)) break;
    errs.push_back(e);
  }
  if (errs.size() >= 6) {
    const auto est = psi::estimate_rate(errs);
    row("rate", "beta_hat", est.beta_hat, beta, std::abs(est.beta_hat - beta) <= 1e-6);
  }

  // first-order expansion against the exact cubic root
  const psi::ElementState z{0.5 * f_over_a / y, f_over_a};
  double prev_gap = 0.0;
  for (double k : {1e-2, 5e-3, 2.5e-3}) {
    const double exact = psi::select_perturbed_root(psi::el_cubic_coeffs(z, y, k, c), z, y, c);
    const double gap = std::abs(psi::perturbed_projection(z.strain, z.stress, y, c, k) - exact);
    if (prev_gap > 0.0) row("expansion", "ratio_k=" + fmt(k), prev_gap / gap, 4.0, std::abs(prev_gap / gap - 4.0) <= 0.8);
    prev_gap = gap;
  }
  return ok ? kExitOk : kExitInput;
}

int run_gen_truss(int rows, int cols, double spacing, double area, double drop, const std::vector<double>& forces,
                  const std::string& law, double y0, double p, double k, const std::string& out) {
  psi::MaterialSpec mat;
  mat.type = psi::parse_law_type(law);
  mat.y0 = y0;
  mat.p = p;
  mat.k = k;
  psi::TrussLoadRecipe recipe;
  recipe.imposed_drop = drop;
  recipe.forces = forces;
  auto desc = psi::generate_truss(rows, cols, spacing, area, recipe, mat);
  const psi::TrussProblem check(desc);
  const std::string text = psi::serialize_problem(desc);
  if (out.empty())
    std::cout << text;
  else
    psi::write_text_file(out, text);
  std::cerr << "nodes=" << check.num_nodes() << " elements=" << check.num_elements() << "\n";
  return kExitOk;
}

int run_nn_check(const std::string& path, std::size_t expect_params, double tol) {
  const auto net = psi::load_network(path);
  bool ok = true;
  std::cout << "layers=" << net.layers.size() << " parameters=" << net.parameter_count() << "\n";
  if (expect_params > 0 && net.parameter_count() != expect_params) {
    std::cout << "error: expected " << expect_params << " parameters\n";
    ok = false;
  }
  if (net.reference.empty()) {
    std::cout << "error: no reference outputs\n";
    ok = false;
  }
  double worst = 0.0;
  std::size_t worst_i = 0;
  for (std::size_t i = 0; i < net.reference.size(); ++i) {
    const auto [eps, sig] = net.reference[i];
    const double y = net.forward_normalized(net.normalize_strain(eps));
    const double dev = std::abs(y - net.normalize_stress(sig));
    if (dev > worst) worst = dev, worst_i = i;
  }
  if (!net.reference.empty()) {
    std::cout << "reference_samples=" << net.reference.size() << " worst_abs_dev=" << fmt(worst)
              << " (sample " << worst_i << ", strain " << fmt(net.reference[worst_i].first) << ")\n";
    if (worst > tol) {
      std::cout << "error: reference mismatch above " << fmt(tol) << "\n";
      ok = false;
    }
  }
  if (net.zero_tolerance > 0.0) {
    const double m0 = psi::mlp_forward(net, 0.0);
    std::cout << "m(0)=" << fmt(m0) << " zero_tolerance=" << fmt(net.zero_tolerance) << "\n";
    if (std::abs(m0) > net.zero_tolerance) {
      std::cout << "error: |m(0)| exceeds the declared zero tolerance\n";
      ok = false;
    }
  }
  return ok ? kExitOk : kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-space iteration solver for nonlinear truss elasticity"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Solve a problem file with PSI or damped Newton-Raphson");
  solve->add_option("--problem", sa.problem, "Problem file")->required();
  solve->add_option("--method", sa.method, "psi or nr")->check(CLI::IsMember({"psi", "nr"}));
  solve->add_option("--c-over-y0", sa.c_over_y0, "Distance constant over zero-strain modulus");
  solve->add_option("--tol1", sa.tol1, "Relative force-residual tolerance");
  solve->add_option("--tol2", sa.tol2, "Relative phase-space step tolerance");
  solve->add_option("--max-iter", sa.max_iter, "Iteration cap");
  solve->add_option("--pd-method", sa.pd_method, "dfm, newton or secant");
  solve->add_option("--workers", sa.workers, "Worker threads for P_D (default PSI_WORKERS or 1)");
  solve->add_option("--out", sa.out, "Results file");
  solve->add_option("--trace", sa.trace, "Trace CSV");
  solve->add_option("--iterates", sa.iterates, "Per-element phase-space trajectory CSV (psi only)");

  std::string cmp_problem, cmp_out;
  unsigned cmp_workers = 0;
  auto* compare = app.add_subcommand("compare", "Run PSI and NR and compare displacements");
  compare->add_option("--problem", cmp_problem, "Problem file")->required();
  compare->add_option("--out", cmp_out, "Report CSV");
  compare->add_option("--workers", cmp_workers, "Worker threads for P_D");

  double a_y = 1.0, a_c = 1.0, a_f = 1.0;
  int a_iters = 40;
  auto* analyze = app.add_subcommand("analyze-1d", "One-bar closed-form, rate and expansion checks");
  analyze->add_option("--y", a_y, "Modulus Y");
  analyze->add_option("--c", a_c, "Distance constant C");
  analyze->add_option("--f-over-a", a_f, "Applied stress F/A");
  analyze->add_option("--iters", a_iters, "Iterations");

  double r_y = 1.0, r_c = 1.0, r_ratio = 1.0;
  int r_ne = 1, r_iters = 30;
  auto* rate = app.add_subcommand("rate", "Error sequence and rate estimate for serial linear bars");
  rate->add_option("--y", r_y, "Modulus Y")->required();
  rate->add_option("--c", r_c, "Distance constant C")->required();
  rate->add_option("--ne", r_ne, "Number of bars");
  rate->add_option("--len-ratio", r_ratio, "Longest over shortest bar length");
  rate->add_option("--iters", r_iters, "Iterations");

  int g_rows = 4, g_cols = 10;
  double g_spacing = 35.0, g_area = 5e-4, g_drop = 0.05, g_y0 = 2e11, g_p = 1e-4, g_k = 0.0;
  std::vector<double> g_forces{-1000.0, -1000.0, -100.0, 1800.0};
  std::string g_law = "power", g_out;
  auto* gen = app.add_subcommand("gen-truss", "Generate a planar grid truss problem file");
  gen->add_option("--rows", g_rows, "Node rows");
  gen->add_option("--cols", g_cols, "Node columns");
  gen->add_option("--spacing", g_spacing, "Grid spacing [m]");
  gen->add_option("--area", g_area, "Bar area [m^2]");
  gen->add_option("--drop", g_drop, "Imposed downward displacement [m], 0 to disable");
  gen->add_option("--forces", g_forces, "Vertical nodal forces [N]")->delimiter(',');
  gen->add_option("--law", g_law, "power, linear or quadratic");
  gen->add_option("--y0", g_y0, "Zero-strain modulus [Pa]");
  gen->add_option("--p", g_p, "Power-law exponent");
  gen->add_option("--k", g_k, "Quadratic perturbation");
  gen->add_option("--out", g_out, "Output file (stdout if omitted)");

  std::string n_weights;
  std::size_t n_params = 25649;
  double n_tol = 1e-6;
  auto* nn = app.add_subcommand("nn-check", "Validate a network weight file");
  nn->add_option("--weights", n_weights, "Weight file")->required();
  nn->add_option("--params", n_params, "Expected parameter count, 0 to skip");
  nn->add_option("--tol", n_tol, "Reference agreement in normalised units");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*solve) return run_solve(sa);
    if (*compare) return run_compare(cmp_problem, cmp_out, cmp_workers);
    if (*analyze) return run_analyze_1d(a_y, a_c, a_f, a_iters);
    if (*rate) return run_rate(r_y, r_c, r_ne, r_ratio, r_iters);
    if (*gen) return run_gen_truss(g_rows, g_cols, g_spacing, g_area, g_drop, g_forces, g_law, g_y0, g_p, g_k, g_out);
    if (*nn) return run_nn_check(n_weights, n_params, n_tol);
  } catch (const psi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
