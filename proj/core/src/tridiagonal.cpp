#include "volcal/tridiagonal.hpp"

#include "volcal/errors.hpp"

#include <cmath>

namespace volcal {

std::vector<double> thomas_solve(const TridiagonalSystem& system,
                                 const std::vector<double>& rhs) {
    const std::size_t n = system.diag.size();
    if (n == 0 || system.sub.size() != n - 1 || system.super.size() != n - 1 ||
        rhs.size() != n)
        throw validation_error("thomas_solve: inconsistent band sizes");

    std::vector<double> scratch_super(n - 1);
    std::vector<double> solution(n);

    double pivot = system.diag[0];
    if (!(std::abs(pivot) > 1e-300))
        throw numerical_error("thomas_solve: zero pivot at row 0");
    if (n > 1) scratch_super[0] = system.super[0] / pivot;
    solution[0] = rhs[0] / pivot;

    for (std::size_t i = 1; i < n; ++i) {
        pivot = system.diag[i] - system.sub[i - 1] * scratch_super[i - 1];
        if (!(std::abs(pivot) > 1e-300))
            throw numerical_error("thomas_solve: zero pivot at row " + std::to_string(i));
        if (i < n - 1) scratch_super[i] = system.super[i] / pivot;
        solution[i] = (rhs[i] - system.sub[i - 1] * solution[i - 1]) / pivot;
    }

    for (std::size_t i = n - 1; i-- > 0;)
        solution[i] -= scratch_super[i] * solution[i + 1];
    return solution;
}

} // namespace volcal
