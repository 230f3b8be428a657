#pragma once

#include <string>
#include <vector>

#include "compsim/util.hpp"

namespace compsim {

enum class Measure { kNcd, kNwd };

// Symmetric n x n similarity matrix. Diagonal entries are kept as
// computed (they are a backend-quality diagnostic, never forced to 0).
// Infinite entries are legal only for NWD and are written as "inf" in
// CSV; the Phylip writer rejects them.
struct DistanceMatrix {
  std::vector<std::string> labels;
  std::vector<double> values;  // row-major n*n
  Measure measure = Measure::kNcd;
  std::string provenance;

  std::size_t size() const { return labels.size(); }
  double& at(std::size_t i, std::size_t j) { return values[i * size() + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }

  // Enforces the type invariants: n >= 2, unique whitespace-free labels,
  // exact symmetry, finite entries within [-0.1, 1.1]. Entries outside
  // [0,1] only warn.
  void validate(const WarningSink& warn = nullptr) const;
};

struct MatrixDiagnostics {
  double diag_min = 0, diag_max = 0, diag_mean = 0;
  std::size_t out_of_unit_range = 0;  // finite entries outside [0,1]
  std::size_t negative_entries = 0;
  std::size_t infinite_entries = 0;
  double symmetry_residual = 0;  // max |a_ij - a_ji|, must be 0
  // Empirical triangle-inequality violations; reported, never enforced.
  std::size_t triangle_violations = 0;
  std::string format() const;
};

MatrixDiagnostics matrix_diagnostics(const DistanceMatrix& m,
                                     const WarningSink& warn = nullptr);

// Phylip square format: first line n, then one row per label padded to
// 10 characters followed by n fixed-point values with 6 decimals.
std::string to_phylip(const DistanceMatrix& m);
DistanceMatrix from_phylip(const std::string& text);

// CSV variant with a header row; infinities as the literal "inf".
std::string to_csv(const DistanceMatrix& m);
DistanceMatrix from_csv(const std::string& text);

// Dispatch by extension (.csv -> CSV, anything else Phylip).
void write_matrix_file(const DistanceMatrix& m, const std::string& path);
DistanceMatrix read_matrix_file(const std::string& path);

}  // namespace compsim
