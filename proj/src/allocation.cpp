#include "safebai/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace safebai {

namespace {

std::string describe(std::span<const double> y) {
    std::ostringstream os;
    os.precision(6);
    os << '(';
    for (std::size_t i = 0; i < y.size(); ++i) os << (i ? ", " : "") << y[i];
    os << ')';
    return os.str();
}

bool allowed_at(std::span<const bool> allowed, std::size_t k) {
    return allowed.empty() || allowed[k];
}

}  // namespace

Allocation l1_min_weights(std::span<const Vector> scaled_arms, std::span<const double> y) {
    const std::size_t k_arms = scaled_arms.size();
    const std::size_t d = y.size();
    Allocation alloc;
    alloc.target.assign(y.begin(), y.end());
    if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; })) {
        alloc.weights.assign(k_arms, 0.0);
        alloc.ratios.assign(k_arms, 1.0 / static_cast<double>(k_arms));
        alloc.degenerate = true;
        return alloc;
    }

    Matrix a(d, 2 * k_arms);
    for (std::size_t k = 0; k < k_arms; ++k) {
        if (scaled_arms[k].size() != d) throw std::invalid_argument("l1_min_weights: dimension mismatch");
        for (std::size_t i = 0; i < d; ++i) {
            a(i, k) = scaled_arms[k][i];
            a(i, k_arms + k) = -scaled_arms[k][i];
        }
    }
    const Vector cost(2 * k_arms, 1.0);
    LpSolution lp;
    try {
        lp = solve_standard_lp(a, y, cost);
    } catch (const InfeasibleProgram&) {
        throw InfeasibleDirection("direction " + describe(y) + " is outside the span of the arms");
    }

    alloc.weights.assign(k_arms, 0.0);
    for (std::size_t k = 0; k < k_arms; ++k) alloc.weights[k] = lp.x[k] - lp.x[k_arms + k];

    double residual = 0.0;
    double scale = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < k_arms; ++k) s += alloc.weights[k] * scaled_arms[k][i];
        residual = std::max(residual, std::abs(s - y[i]));
        scale = std::max(scale, std::abs(y[i]));
    }
    if (residual > 1e-8 * scale) {
        throw InfeasibleDirection("direction " + describe(y) + " could not be reproduced (residual " +
                                  std::to_string(residual) + ")");
    }
    alloc.l1_norm = 0.0;
    for (double w : alloc.weights) alloc.l1_norm += std::abs(w);
    alloc.ratios = ratios_from_weights(alloc.weights);
    return alloc;
}

Vector ratios_from_weights(std::span<const double> weights) {
    double l1 = 0.0;
    for (double w : weights) l1 += std::abs(w);
    if (!(l1 > 0.0)) throw DegenerateAllocation("ratios_from_weights: zero weight vector");
    Vector r(weights.size());
    for (std::size_t k = 0; k < weights.size(); ++k) r[k] = std::abs(weights[k]) / l1;
    return r;
}

double allocation_objective(const SymMatrix& design, std::span<const Vector> scaled_arms,
                            std::span<const double> nu, std::span<const double> y) {
    Matrix m = design.dense();
    const std::size_t d = m.rows();
    for (std::size_t k = 0; k < scaled_arms.size(); ++k) {
        if (nu[k] == 0.0) continue;
        const auto& x = scaled_arms[k];
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) m(i, j) += nu[k] * x[i] * x[j];
    }
    return dot(y, solve(m, y));
}

FrankWolfeResult nu_star_finite(const PosDefState& design, std::span<const Vector> scaled_arms,
                                std::span<const double> y, int budget) {
    const std::size_t k_arms = scaled_arms.size();
    const std::size_t d = design.dim();
    FrankWolfeResult res;
    res.nu.assign(k_arms, 1.0 / static_cast<double>(k_arms));
    if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; })) {
        res.degenerate = true;
        return res;
    }

    for (int it = 0; it < budget; ++it) {
        Matrix m = design.matrix().dense();
        for (std::size_t k = 0; k < k_arms; ++k) {
            const auto& x = scaled_arms[k];
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) m(i, j) += res.nu[k] * x[i] * x[j];
        }
        const Vector z = solve(m, y);  // M⁻¹y
        res.objective = dot(y, z);

        // Gradient component k is −(x̃_kᵀ M⁻¹ y)².
        std::size_t vertex = 0;
        double best = -1.0;
        double inner = 0.0;
        for (std::size_t k = 0; k < k_arms; ++k) {
            const double g = dot(scaled_arms[k], z);
            const double g2 = g * g;
            inner += res.nu[k] * g2;
            if (g2 > best) {
                best = g2;
                vertex = k;
            }
        }
        res.duality_gap = best - inner;
        res.iterations = it;
        if (res.duality_gap < 1e-8) break;

        const double step = 2.0 / (static_cast<double>(it) + 2.0);
        for (std::size_t k = 0; k < k_arms; ++k) res.nu[k] *= (1.0 - step);
        res.nu[vertex] += step;
        res.iterations = it + 1;
    }
    res.objective = allocation_objective(design.matrix(), scaled_arms, res.nu, y);
    return res;
}

std::size_t greedy_select(const PosDefState& design, std::span<const Vector> scaled_arms,
                          std::span<const double> y, std::span<const bool> allowed) {
    const Vector ay = design.inv_apply(y);
    const double base = dot(y, ay);
    std::size_t best_k = scaled_arms.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < scaled_arms.size(); ++k) {
        if (!allowed_at(allowed, k)) continue;
        const auto& x = scaled_arms[k];
        const double yax = dot(ay, x);
        const double value = base - yax * yax / (1.0 + design.inv_quadratic(x));
        // Near-equal values count as ties and keep the lower index.
        if (best_k == scaled_arms.size() || value < best - 1e-12 * std::max(1.0, std::abs(best))) {
            best = value;
            best_k = k;
        }
    }
    if (best_k == scaled_arms.size()) throw std::logic_error("greedy_select: empty safe set");
    return best_k;
}

std::size_t rounding_select(const PullCounts& counts, std::span<const double> ratios,
                            std::span<const bool> allowed) {
    std::size_t best_k = ratios.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ratios.size(); ++k) {
        if (!allowed_at(allowed, k) || ratios[k] <= 1e-12) continue;
        const double v = counts.n[k] / ratios[k];
        if (v < best) {
            best = v;
            best_k = k;
        }
    }
    if (best_k == ratios.size()) {
        throw DegenerateAllocation("rounding_select: no allowed arm with positive ratio");
    }
    return best_k;
}

double relaxed_design_value(const Matrix& x, std::span<const double> mu, std::span<const double> y,
                            double reg) {
    const std::size_t d = x.rows();
    Matrix m = Matrix::identity(d, reg);
    for (std::size_t k = 0; k < x.cols(); ++k)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) m(i, j) += mu[k] * x(i, k) * x(j, k);
    return reg * dot(y, solve(m, y));
}

double reproduction_value(const Matrix& x, std::span<const double> mu, std::span<const double> y,
                          double reg) {
    const std::size_t k_arms = x.cols();
    const Matrix xt = x.transposed();
    Matrix normal = xt * x;
    for (std::size_t k = 0; k < k_arms; ++k) normal(k, k) += reg / mu[k];
    const Vector w = solve(normal, xt.apply(y));
    const Vector fit = x.apply(w);
    double value = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) value += (y[i] - fit[i]) * (y[i] - fit[i]);
    for (std::size_t k = 0; k < k_arms; ++k) value += reg * w[k] * w[k] / mu[k];
    return value;
}

double direction_count(const Allocation& alloc, const PullCounts& counts,
                       std::span<const double> gammas) {
    double n_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < alloc.weights.size(); ++k) {
        const double w = std::abs(alloc.weights[k]);
        if (w == 0.0) continue;
        n_min = std::min(n_min, counts.n[k] / (gammas[k] * gammas[k] * w));
    }
    return n_min;
}

}  // namespace safebai
