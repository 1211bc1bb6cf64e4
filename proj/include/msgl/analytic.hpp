#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "msgl/distribution.hpp"
#include "msgl/transforms.hpp"

namespace msgl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline std::vector<double> rotate_atom(const std::vector<double>& atom,
                                       const SampleGeometry& geom, int k) {
    std::vector<double> out(atom.size());
    rotate_sample(atom.data(), out.data(), geom, k);
    return out;
}

/// Pushforward of P under rotation k: atoms rotate, probabilities and their
/// order are preserved.
inline FiniteDistribution transformed_marginal(const FiniteDistribution& P, int k) {
    check_rotation(k);
    std::vector<std::vector<double>> atoms;
    atoms.reserve(P.size());
    for (const auto& a : P.atoms()) atoms.push_back(rotate_atom(a, P.geometry(), k));
    return FiniteDistribution(P.geometry(), std::move(atoms), P.probs());
}

/// Density of the k-th pushforward at x: p^{T_k}(x) = p(T_k^{-1} x).
inline double marginal_at(const FiniteDistribution& P, int k, const std::vector<double>& x) {
    return P.prob_of(rotate_atom(x, P.geometry(), inverse_rotation(k)));
}

/// Equal-weight mixture of the K pushforwards; coincident atoms merge.
inline FiniteDistribution mixture_over_transforms(const FiniteDistribution& P) {
    std::vector<std::vector<double>> atoms;
    std::vector<double> probs;
    auto deposit = [&](const std::vector<double>& atom, double p) {
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            if (atoms_equal(atoms[i], atom)) {
                probs[i] += p;
                return;
            }
        }
        atoms.push_back(atom);
        probs.push_back(p);
    };
    const double w = 1.0 / kRotationCount;
    for (int k = 1; k <= kRotationCount; ++k) {
        for (std::size_t i = 0; i < P.size(); ++i) {
            deposit(rotate_atom(P.atoms()[i], P.geometry(), k), w * P.probs()[i]);
        }
    }
    return FiniteDistribution(P.geometry(), std::move(atoms), std::move(probs));
}

/// Union support of the K pushforwards of the given distributions.
inline std::vector<std::vector<double>> union_support(
    const std::vector<const FiniteDistribution*>& dists) {
    std::vector<std::vector<double>> atoms;
    auto deposit = [&](const std::vector<double>& atom) {
        for (const auto& existing : atoms) {
            if (atoms_equal(existing, atom)) return;
        }
        atoms.push_back(atom);
    };
    for (const FiniteDistribution* P : dists) {
        for (int k = 1; k <= kRotationCount; ++k) {
            for (const auto& a : P->atoms()) deposit(rotate_atom(a, P->geometry(), k));
        }
    }
    return atoms;
}

/// Best rotation classifier against P_d alone: row k at x is proportional to
/// the k-th transformed marginal, C_k(x) = p_d^{T_k}(x) / sum_j p_d^{T_j}(x).
inline ClassifierTable optimal_classifier_ss(const FiniteDistribution& P_d) {
    std::vector<std::vector<double>> atoms = union_support({&P_d});
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<double>> kept;
    for (auto& x : atoms) {
        std::vector<double> row(kRotationCount);
        double total = 0.0;
        for (int k = 1; k <= kRotationCount; ++k) {
            row[k - 1] = marginal_at(P_d, k, x);
            total += row[k - 1];
        }
        if (total <= 0.0) continue;  // unreachable under the mixture
        for (double& v : row) v /= total;
        kept.push_back(std::move(x));
        rows.push_back(std::move(row));
    }
    return ClassifierTable(P_d.geometry(), std::move(kept), std::move(rows));
}

/// Best (K+1)-way classifier of the multi-class game for fixed P_g. Row
/// entries are the per-class posterior masses: class k gets
/// (1/K) p_d^{T_k}(x), the fake class gets p_g^T(x), normalized.
inline ClassifierTable optimal_classifier_ms(const FiniteDistribution& P_d,
                                             const FiniteDistribution& P_g) {
    std::vector<std::vector<double>> atoms = union_support({&P_d, &P_g});
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<double>> kept;
    for (auto& x : atoms) {
        std::vector<double> row(kRotationCount + 1, 0.0);
        double total = 0.0;
        for (int k = 1; k <= kRotationCount; ++k) {
            row[k - 1] = marginal_at(P_d, k, x) / kRotationCount;
            total += row[k - 1];
        }
        double fake = 0.0;
        for (int k = 1; k <= kRotationCount; ++k) fake += marginal_at(P_g, k, x);
        fake /= kRotationCount;
        row[kRotationCount] = fake;
        total += fake;
        if (total <= 0.0) continue;
        for (double& v : row) v /= total;
        kept.push_back(std::move(x));
        rows.push_back(std::move(row));
    }
    return ClassifierTable(P_d.geometry(), std::move(kept), std::move(rows));
}

/// The generator-side rotation value under a fixed classifier:
/// (1/K) sum_k E_{x ~ P_g^{T_k}} log C_k(x). Always <= 0; atoms the table
/// does not cover (or covers with zero mass on the needed class) force the
/// -inf sentinel and are reported.
struct PhiSsResult {
    double value = 0.0;
    std::vector<std::vector<double>> uncovered;  // atoms hit with log(0)
    bool is_finite() const { return uncovered.empty(); }
};

inline PhiSsResult phi_ss_value(const FiniteDistribution& P_g, const ClassifierTable& C) {
    PhiSsResult result;
    double acc = 0.0;
    for (int k = 1; k <= kRotationCount; ++k) {
        for (std::size_t i = 0; i < P_g.size(); ++i) {
            const double p = P_g.probs()[i];
            if (p == 0.0) continue;
            std::vector<double> x = rotate_atom(P_g.atoms()[i], P_g.geometry(), k);
            int row = C.find(x);
            const double c = row < 0 ? 0.0 : C.rows()[row][k - 1];
            if (c <= 0.0) {
                result.uncovered.push_back(std::move(x));
                continue;
            }
            acc += p * std::log(c);
        }
    }
    result.value = result.uncovered.empty() ? acc / kRotationCount : -kInf;
    return result;
}

/// Exact KL divergence in nats. +inf when supp(P) is not contained in
/// supp(Q); the 0 log 0 convention applies.
inline double kl_divergence(const FiniteDistribution& P, const FiniteDistribution& Q) {
    double acc = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) {
        const double p = P.probs()[i];
        if (p == 0.0) continue;
        const double q = Q.prob_of(P.atoms()[i]);
        if (q == 0.0) return kInf;
        acc += p * std::log(p / q);
    }
    return acc;
}

/// The multi-class generator value at the game's optimal classifier,
/// decomposed as total = -kl_term + residual_term with
///   kl_term       = (1/K) sum_k KL(P_g^{T_k} || P_d^{T_k})
///   residual_term = (1/K) sum_k E_{x ~ P_g^{T_k}} log(p_d^{T_k}(x) / sum_j p_d^{T_j}(x)).
///
/// mixture_kl_term is KL(P_g^T || P_d^T), the divergence between the rotated
/// mixtures. Evaluating the game value directly through the optimal table
/// (phi_ms_from_table) yields -mixture_kl_term + residual_term; the two KL
/// terms coincide when the generator matches the data (and the headline
/// kl_term always dominates by convexity), so both decompositions vanish
/// together at the equilibrium.
struct PhiMsValue {
    double total = 0.0;
    double kl_term = 0.0;
    double residual_term = 0.0;
    double mixture_kl_term = 0.0;
};

inline PhiMsValue phi_ms_value(const FiniteDistribution& P_g, const FiniteDistribution& P_d) {
    PhiMsValue v;
    double kl_acc = 0.0;
    for (int k = 1; k <= kRotationCount; ++k) {
        kl_acc += kl_divergence(transformed_marginal(P_g, k), transformed_marginal(P_d, k));
    }
    v.kl_term = kl_acc / kRotationCount;
    v.mixture_kl_term =
        kl_divergence(mixture_over_transforms(P_g), mixture_over_transforms(P_d));

    double res_acc = 0.0;
    bool res_finite = true;
    for (int k = 1; k <= kRotationCount && res_finite; ++k) {
        for (std::size_t i = 0; i < P_g.size(); ++i) {
            const double p = P_g.probs()[i];
            if (p == 0.0) continue;
            std::vector<double> x = rotate_atom(P_g.atoms()[i], P_g.geometry(), k);
            const double num = marginal_at(P_d, k, x);
            double den = 0.0;
            for (int j = 1; j <= kRotationCount; ++j) den += marginal_at(P_d, j, x);
            if (num <= 0.0 || den <= 0.0) {
                res_finite = false;
                break;
            }
            res_acc += p * std::log(num / den);
        }
    }
    v.residual_term = res_finite ? res_acc / kRotationCount : -kInf;
    v.total = -v.kl_term + v.residual_term;
    return v;
}

/// Same value computed the long way, directly from a (K+1)-column table:
/// (1/K) sum_k E_{x ~ P_g^{T_k}} [log C_k(x) - log C_{K+1}(x)].
/// Used as an independent route against phi_ms_value.
inline double phi_ms_from_table(const FiniteDistribution& P_g, const ClassifierTable& C) {
    if (!C.has_fake_class()) {
        throw ContractError("phi_ms_from_table: table lacks the fake class column");
    }
    double acc = 0.0;
    for (int k = 1; k <= kRotationCount; ++k) {
        for (std::size_t i = 0; i < P_g.size(); ++i) {
            const double p = P_g.probs()[i];
            if (p == 0.0) continue;
            std::vector<double> x = rotate_atom(P_g.atoms()[i], P_g.geometry(), k);
            int row = C.find(x);
            if (row < 0) return -kInf;
            const double ck = C.rows()[row][k - 1];
            const double cf = C.rows()[row][kRotationCount];
            if (ck <= 0.0 || cf <= 0.0) return -kInf;
            acc += p * (std::log(ck) - std::log(cf));
        }
    }
    return acc / kRotationCount;
}

/// Constructive demonstration of the rotation-task loophole: a point-mass
/// generator at a support atom whose rotations never appear in the data
/// scores the maximal generator value (zero) while being maximally collapsed.
struct LoopholeResult {
    bool found = false;
    bool degenerate = false;  // P_d itself is a point mass
    std::vector<double> atom;
    double phi_collapsed = 0.0;  // generator value of the point mass
    double phi_data = 0.0;       // generator value of P_d itself
    double kl = 0.0;             // KL(collapsed || P_d)
};

inline LoopholeResult loophole_construct(const FiniteDistribution& P_d) {
    LoopholeResult result;
    for (std::size_t i = 0; i < P_d.size(); ++i) {
        const auto& a = P_d.atoms()[i];
        bool disjoint = true;
        for (int k = 2; k <= kRotationCount; ++k) {
            if (P_d.find(rotate_atom(a, P_d.geometry(), k)) >= 0) {
                disjoint = false;
                break;
            }
        }
        if (!disjoint) continue;
        FiniteDistribution collapsed = FiniteDistribution::point_mass(a, P_d.geometry());
        ClassifierTable best = optimal_classifier_ss(P_d);
        result.found = true;
        result.degenerate = P_d.size() == 1;
        result.atom = a;
        result.phi_collapsed = phi_ss_value(collapsed, best).value;
        result.phi_data = phi_ss_value(P_d, best).value;
        result.kl = kl_divergence(collapsed, P_d);
        return result;
    }
    return result;
}

}  // namespace msgl
