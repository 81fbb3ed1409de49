#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include "safebai/linalg.hpp"

namespace safebai {

class InfeasibleProgram : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnboundedProgram : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LpSolution {
    Vector x;
    double objective = 0.0;
    int pivots = 0;
};

/// min cᵀx  s.t.  A x = b, x >= 0.
///
/// Dense two-phase primal simplex on a full tableau with Bland's rule for both
/// the entering and the leaving variable. Redundant equality rows are dropped
/// after phase one. The returned basic solution is re-solved from the original
/// columns so its accuracy does not depend on the pivot history.
LpSolution solve_standard_lp(const Matrix& a, std::span<const double> b, std::span<const double> c);

}  // namespace safebai
