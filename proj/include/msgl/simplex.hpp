#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "msgl/analytic.hpp"
#include "msgl/distribution.hpp"

namespace msgl {

/// Euclidean projection onto the probability simplex (sort-and-threshold).
inline std::vector<double> project_to_simplex(std::vector<double> v) {
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumulative = 0.0;
    double tau = 0.0;
    std::size_t support = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        cumulative += u[i];
        const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
        if (u[i] - candidate > 0.0) {
            tau = candidate;
            support = i + 1;
        }
    }
    (void)support;
    for (double& x : v) x = std::max(x - tau, 0.0);
    return v;
}

/// Maximize sum_i w_i log(c_i) over the simplex by projected gradient
/// ascent. Deliberately oblivious to the closed-form answer; this is the
/// independent oracle the analytic classifiers are checked against.
inline std::vector<double> maximize_weighted_log(std::vector<double> weights,
                                                 std::size_t steps = 10000,
                                                 double step_size = 0.1) {
    const std::size_t n = weights.size();
    // The argmax is invariant to scaling the weights; normalizing keeps the
    // gradient magnitudes comparable across rows.
    double total = 0.0;
    for (double w : weights) total += w;
    if (total > 0.0) {
        for (double& w : weights) w /= total;
    }
    std::vector<double> c(n, 1.0 / static_cast<double>(n));
    std::vector<double> y(n);
    for (std::size_t it = 0; it < steps; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            const double denom = std::max(c[i], 1e-8);
            y[i] = c[i] + step_size * weights[i] / denom;
        }
        c = project_to_simplex(y);
    }
    return c;
}

/// Discriminator-side rotation objective of the plain game, maximized
/// numerically row by row over the union support of P_d's pushforwards.
inline ClassifierTable numeric_optimal_ss(const FiniteDistribution& P_d,
                                          std::size_t steps = 10000, double step_size = 0.1) {
    std::vector<std::vector<double>> atoms = union_support({&P_d});
    std::vector<std::vector<double>> kept;
    std::vector<std::vector<double>> rows;
    for (auto& x : atoms) {
        std::vector<double> w(kRotationCount);
        double total = 0.0;
        for (int k = 1; k <= kRotationCount; ++k) {
            w[k - 1] = marginal_at(P_d, k, x) / kRotationCount;
            total += w[k - 1];
        }
        if (total <= 0.0) continue;
        kept.push_back(std::move(x));
        rows.push_back(maximize_weighted_log(std::move(w), steps, step_size));
    }
    return ClassifierTable(P_d.geometry(), std::move(kept), std::move(rows));
}

/// Same treatment for the multi-class objective: the fake class competes for
/// row mass with weight p_g^T(x).
inline ClassifierTable numeric_optimal_ms(const FiniteDistribution& P_d,
                                          const FiniteDistribution& P_g,
                                          std::size_t steps = 10000, double step_size = 0.1) {
    std::vector<std::vector<double>> atoms = union_support({&P_d, &P_g});
    std::vector<std::vector<double>> kept;
    std::vector<std::vector<double>> rows;
    for (auto& x : atoms) {
        std::vector<double> w(kRotationCount + 1, 0.0);
        double total = 0.0;
        for (int k = 1; k <= kRotationCount; ++k) {
            w[k - 1] = marginal_at(P_d, k, x) / kRotationCount;
            total += w[k - 1];
        }
        for (int k = 1; k <= kRotationCount; ++k) {
            w[kRotationCount] += marginal_at(P_g, k, x) / kRotationCount;
        }
        total += w[kRotationCount];
        if (total <= 0.0) continue;
        kept.push_back(std::move(x));
        rows.push_back(maximize_weighted_log(std::move(w), steps, step_size));
    }
    return ClassifierTable(P_d.geometry(), std::move(kept), std::move(rows));
}

/// Largest per-row total-variation distance between two tables covering the
/// same atoms (rows are matched by atom, not position).
inline double table_max_row_tv(const ClassifierTable& a, const ClassifierTable& b) {
    if (a.size() != b.size() || a.class_count() != b.class_count()) {
        throw ContractError("table_max_row_tv: tables are not comparable");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        int j = b.find(a.atoms()[i]);
        if (j < 0) throw ContractError("table_max_row_tv: atom missing from second table");
        double tv = 0.0;
        for (std::size_t c = 0; c < a.class_count(); ++c) {
            tv += std::fabs(a.rows()[i][c] - b.rows()[static_cast<std::size_t>(j)][c]);
        }
        worst = std::max(worst, 0.5 * tv);
    }
    return worst;
}

}  // namespace msgl
