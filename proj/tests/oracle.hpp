#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's numerics; dense algebra goes through Eigen.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

inline Eigen::VectorXd to_eigen(const Vec& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Eigen::MatrixXd columns(const std::vector<Vec>& cols) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(cols.front().size()),
                      static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = to_eigen(cols[j]);
    return m;
}

inline Vec random_vector(std::mt19937_64& g, std::size_t n, double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, scale);
    Vec v(n);
    for (double& x : v) x = nd(g);
    return v;
}

// Ridge estimate (λI + XᵀX)⁻¹Xᵀy from the whole batch at once.
inline Eigen::VectorXd batch_ridge(const std::vector<Vec>& xs, const Vec& ys, double lambda) {
    const auto d = static_cast<Eigen::Index>(xs.front().size());
    Eigen::MatrixXd a = lambda * Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
    for (std::size_t s = 0; s < xs.size(); ++s) {
        const Eigen::VectorXd x = to_eigen(xs[s]);
        a += x * x.transpose();
        b += ys[s] * x;
    }
    return a.ldlt().solve(b);
}

// min ‖w‖₁ s.t. Xw = y by enumerating every basic solution of [X, −X] w± = y.
// Returns nullopt when no basic solution is feasible.
inline std::optional<double> l1_min_by_vertices(const std::vector<Vec>& arms, const Vec& y) {
    const std::size_t k = arms.size();
    const std::size_t d = y.size();
    const Eigen::MatrixXd x = columns(arms);
    const Eigen::VectorXd target = to_eigen(y);
    Eigen::FullPivLU<Eigen::MatrixXd> full(x);
    const auto rank = static_cast<std::size_t>(full.rank());
    if (rank == 0) return std::nullopt;

    double best = std::numeric_limits<double>::infinity();
    // choose `rank` arm indices; a vertex of the split program uses each arm
    // at most once (with either sign), so this covers all of them
    std::vector<int> pick(k, 0);
    std::fill(pick.begin(), pick.begin() + static_cast<long>(rank), 1);
    std::sort(pick.begin(), pick.end());
    do {
        Eigen::MatrixXd sub(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(rank));
        std::size_t c = 0;
        for (std::size_t j = 0; j < k; ++j)
            if (pick[j]) sub.col(static_cast<Eigen::Index>(c++)) = x.col(static_cast<Eigen::Index>(j));
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
        if (static_cast<std::size_t>(qr.rank()) < rank) continue;
        const Eigen::VectorXd w = qr.solve(target);
        if ((sub * w - target).norm() > 1e-9 * std::max(1.0, target.norm())) continue;
        best = std::min(best, w.lpNorm<1>());
    } while (std::next_permutation(pick.begin(), pick.end()));
    if (!std::isfinite(best)) return std::nullopt;
    return best;
}

// Principal branch by bisection on w·eʷ, monotone on [−1, ∞).
inline double lambert_w0_bisect(double x) {
    double lo = -1.0;
    double hi = std::max(1.0, std::log1p(std::max(0.0, x)) + 1.0);
    for (int i = 0; i < 400; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid * std::exp(mid) < x) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace oracle
