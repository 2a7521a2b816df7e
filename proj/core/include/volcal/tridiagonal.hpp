#pragma once

#include <vector>

namespace volcal {

// Tridiagonal system: sub has n-1 entries (row i couples to i-1), diag has n,
// super has n-1 (row i couples to i+1).
struct TridiagonalSystem {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;
};

// Thomas algorithm, O(n). Throws numerical_error on a vanishing pivot.
// Intended for the diagonally dominant systems produced by the pricer; the
// relative residual of the returned solution is at machine precision there.
std::vector<double> thomas_solve(const TridiagonalSystem& system,
                                 const std::vector<double>& rhs);

} // namespace volcal
