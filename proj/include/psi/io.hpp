#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "psi/mesh.hpp"
#include "psi/solution.hpp"

namespace psi {

/// Parse a problem file into a description without building the problem.
/// Throws ValidationError naming the offending JSON path.
TrussDescription parse_problem(const std::string& text);
TrussDescription load_problem_description(const std::filesystem::path& path);

/// load_problem_description + TrussProblem validation.
TrussProblem load_problem(const std::filesystem::path& path);

std::string serialize_problem(const TrussDescription& description);
void save_problem(const std::filesystem::path& path, const TrussDescription& description);

/// Results file: solver, stop reason, iterations, displacements, element
/// strains and stresses, reactions. Timings are left out so equal runs give
/// byte-identical files.
std::string serialize_results(const Solution& solution);
void save_results(const std::filesystem::path& path, const Solution& solution);
Solution parse_results(const std::string& text);
Solution load_results(const std::filesystem::path& path);

/// CSV with header iter,residual_rel,ps_step_rel,t_pe_ms,t_pd_ms.
void write_trace_csv(std::ostream& out, const Solution& solution);
void save_trace_csv(const std::filesystem::path& path, const Solution& solution);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace psi
