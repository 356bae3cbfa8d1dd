#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ringsim/errors.hpp"

namespace ringsim::qstate {

// A validated per-party symmetry-breaking unitary for m eligible parties.
// Even m: a 2x2 matrix applied to the party's cat qubit. Odd m: a 4x4 matrix
// applied to (cat qubit, fresh ancilla) after a CNOT between them.
struct MagicUnitarySpec {
  int m = 0;
  int arity = 1;  // 1 for even m, 2 for odd m
  Eigen::MatrixXcd matrix;
  std::string variant;    // which transcription variant was selected (or best rejected)
  double defect = 0;      // operator-norm distance of M^dagger M from identity
  double residue = 0;     // probability mass left on the forbidden span
  bool supported = false;
  std::string note;
};

// Operator-norm distance of M^dagger M from the identity.
double unitarity_defect(const Eigen::MatrixXcd& m);

// Probability mass left on the forbidden patterns after applying the
// candidate per-party to the m-party cat state. Brute-force statevector for
// m <= 6, analytic amplitude cancellation for larger m.
double support_residue(int m, const Eigen::MatrixXcd& candidate);

// Constructs candidates from the printed formulas plus a fixed list of
// transcription variants, gates them on unitarity and zero support, and
// returns the first passing variant (or an unsupported spec).
MagicUnitarySpec build_magic(int m);

struct MagicReportRow {
  int m;
  bool supported;
  std::string variant;
  double defect;
  double residue;
  std::string residue_method;  // "brute-force" or "analytic"
  std::string note;
};

std::vector<MagicReportRow> validate_magic(int m_lo, int m_hi);

}  // namespace ringsim::qstate
