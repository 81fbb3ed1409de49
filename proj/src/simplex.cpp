#include "safebai/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace safebai {

namespace {

constexpr double kPivotTol = 1e-11;

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_(rows + 1, cols + 1) {}

    double& at(std::size_t r, std::size_t c) { return t_(r, c); }
    double rhs(std::size_t r) const { return t_(r, cols_); }
    double& rhs(std::size_t r) { return t_(r, cols_); }
    double& cost(std::size_t c) { return t_(rows_, c); }
    double objective() const { return -t_(rows_, cols_); }

    void pivot(std::size_t pr, std::size_t pc) {
        const double p = t_(pr, pc);
        for (std::size_t j = 0; j <= cols_; ++j) t_(pr, j) /= p;
        for (std::size_t r = 0; r <= rows_; ++r) {
            if (r == pr) continue;
            const double f = t_(r, pc);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) t_(r, j) -= f * t_(pr, j);
            t_(r, pc) = 0.0;
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    Matrix t_;
};

// Runs Bland-rule iterations on the tableau over columns [0, allowed).
// Returns false if the program is unbounded.
bool iterate(Tableau& tab, std::vector<std::size_t>& basis, std::vector<bool>& active,
             std::size_t allowed, int& pivots) {
    const std::size_t m = tab.rows();
    double scale = 1.0;
    for (std::size_t j = 0; j < allowed; ++j) scale = std::max(scale, std::abs(tab.cost(j)));
    for (int guard = 0; guard < 100000; ++guard) {
        std::size_t enter = allowed;
        for (std::size_t j = 0; j < allowed; ++j) {
            if (tab.cost(j) < -kPivotTol * scale) {
                enter = j;
                break;
            }
        }
        if (enter == allowed) return true;

        std::size_t leave = m;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < m; ++r) {
            if (!active[r]) continue;
            const double a = tab.at(r, enter);
            if (a <= kPivotTol) continue;
            const double ratio = tab.rhs(r) / a;
            if (ratio < best_ratio - 1e-14 ||
                (std::abs(ratio - best_ratio) <= 1e-14 && leave < m && basis[r] < basis[leave])) {
                best_ratio = ratio;
                leave = r;
            }
        }
        if (leave == m) return false;
        tab.pivot(leave, enter);
        basis[leave] = enter;
        ++pivots;
    }
    throw std::runtime_error("simplex: iteration limit reached");
}

}  // namespace

LpSolution solve_standard_lp(const Matrix& a, std::span<const double> b, std::span<const double> c) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (b.size() != m || c.size() != n) throw std::invalid_argument("simplex: dimension mismatch");

    // Columns: n structural, m artificial.
    Tableau tab(m, n + m);
    std::vector<std::size_t> basis(m);
    std::vector<bool> active(m, true);
    double b_scale = 1.0;
    for (std::size_t r = 0; r < m; ++r) {
        const double sign = b[r] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) tab.at(r, j) = sign * a(r, j);
        tab.at(r, n + r) = 1.0;
        tab.rhs(r) = sign * b[r];
        basis[r] = n + r;
        b_scale = std::max(b_scale, std::abs(b[r]));
    }

    // Phase one: minimize the sum of artificials, priced out against the basis.
    for (std::size_t j = 0; j < n + m; ++j) tab.cost(j) = 0.0;
    tab.rhs(m) = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t j = 0; j < n; ++j) tab.cost(j) -= tab.at(r, j);
        tab.rhs(m) -= tab.rhs(r);
    }
    int pivots = 0;
    iterate(tab, basis, active, n, pivots);
    if (tab.objective() > 1e-9 * b_scale) {
        throw InfeasibleProgram("simplex: no nonnegative solution of the equality system");
    }

    // Drive artificials out of the basis or drop their rows as redundant.
    for (std::size_t r = 0; r < m; ++r) {
        if (basis[r] < n) continue;
        std::size_t col = n;
        double best = 1e-9;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(tab.at(r, j)) > best) {
                best = std::abs(tab.at(r, j));
                col = j;
            }
        }
        if (col == n) {
            active[r] = false;
        } else {
            tab.pivot(r, col);
            basis[r] = col;
            ++pivots;
        }
    }

    // Phase two: real costs priced out against the current basis.
    for (std::size_t j = 0; j < n + m; ++j) tab.cost(j) = j < n ? c[j] : 0.0;
    tab.rhs(m) = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        if (!active[r]) continue;
        const double cb = c[basis[r]];
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j <= n + m; ++j) {
            if (j == n + m) {
                tab.rhs(m) -= cb * tab.rhs(r);
            } else {
                tab.cost(j) -= cb * tab.at(r, j);
            }
        }
    }
    if (!iterate(tab, basis, active, n, pivots)) {
        throw UnboundedProgram("simplex: objective unbounded below");
    }

    // Re-solve the final basis from the original data.
    std::vector<std::size_t> rows_kept;
    std::vector<std::size_t> cols_basic;
    for (std::size_t r = 0; r < m; ++r) {
        if (!active[r]) continue;
        rows_kept.push_back(r);
        cols_basic.push_back(basis[r]);
    }
    LpSolution sol;
    sol.x.assign(n, 0.0);
    sol.pivots = pivots;
    if (!rows_kept.empty()) {
        const std::size_t k = rows_kept.size();
        Matrix basis_matrix(k, k);
        Vector rhs(k);
        for (std::size_t i = 0; i < k; ++i) {
            rhs[i] = b[rows_kept[i]];
            for (std::size_t j = 0; j < k; ++j) basis_matrix(i, j) = a(rows_kept[i], cols_basic[j]);
        }
        Vector xb;
        try {
            xb = solve(basis_matrix, rhs);
        } catch (const std::domain_error&) {
            xb.assign(k, 0.0);
            for (std::size_t i = 0; i < k; ++i) xb[i] = tab.rhs(rows_kept[i]);
        }
        for (std::size_t i = 0; i < k; ++i) sol.x[cols_basic[i]] = std::max(0.0, xb[i]);
    }
    sol.objective = dot(c, sol.x);
    return sol;
}

}  // namespace safebai
