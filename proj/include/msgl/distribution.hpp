#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "msgl/error.hpp"
#include "msgl/transforms.hpp"

namespace msgl {

/// Two support atoms closer than this (L-infinity) are the same atom.
inline constexpr double kAtomTolerance = 1e-9;

inline bool atoms_equal(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::fabs(a[i] - b[i]) > kAtomTolerance) return false;
    }
    return true;
}

/// Explicit probability table over a finite support of points or small
/// images. The substrate for every exact computation in the library.
class FiniteDistribution {
public:
    FiniteDistribution(SampleGeometry geom, std::vector<std::vector<double>> atoms,
                       std::vector<double> probs)
        : geom_(geom), atoms_(std::move(atoms)), probs_(std::move(probs)) {
        if (atoms_.size() != probs_.size()) {
            throw ContractError("FiniteDistribution: atom/probability count mismatch");
        }
        if (atoms_.empty()) {
            throw ContractError("FiniteDistribution: empty support");
        }
        double total = 0.0;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            if (atoms_[i].size() != geom_.dim()) {
                throw ShapeError("FiniteDistribution: atom dimension mismatch");
            }
            if (probs_[i] < 0.0) {
                throw ContractError("FiniteDistribution: negative probability");
            }
            total += probs_[i];
            for (std::size_t j = i + 1; j < atoms_.size(); ++j) {
                if (atoms_equal(atoms_[i], atoms_[j])) {
                    throw ContractError("FiniteDistribution: duplicate atom " +
                                        std::to_string(i) + "/" + std::to_string(j));
                }
            }
        }
        if (std::fabs(total - 1.0) > 1e-12) {
            throw ContractError("FiniteDistribution: probabilities sum to " +
                                std::to_string(total));
        }
    }

    static FiniteDistribution point_mass(std::vector<double> atom, SampleGeometry geom) {
        return FiniteDistribution(geom, {std::move(atom)}, {1.0});
    }

    static FiniteDistribution uniform(std::vector<std::vector<double>> atoms,
                                      SampleGeometry geom) {
        std::vector<double> probs(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
        return FiniteDistribution(geom, std::move(atoms), std::move(probs));
    }

    const SampleGeometry& geometry() const { return geom_; }
    const std::vector<std::vector<double>>& atoms() const { return atoms_; }
    const std::vector<double>& probs() const { return probs_; }
    std::size_t size() const { return atoms_.size(); }

    /// Index of an atom, or -1 when it is not in the support.
    int find(const std::vector<double>& atom) const {
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            if (atoms_equal(atoms_[i], atom)) return static_cast<int>(i);
        }
        return -1;
    }

    double prob_of(const std::vector<double>& atom) const {
        int i = find(atom);
        return i < 0 ? 0.0 : probs_[i];
    }

private:
    SampleGeometry geom_;
    std::vector<std::vector<double>> atoms_;
    std::vector<double> probs_;
};

/// Per-atom probability rows over K rotation classes, optionally plus the
/// fake class as column K. Each row sums to 1.
class ClassifierTable {
public:
    ClassifierTable(SampleGeometry geom, std::vector<std::vector<double>> atoms,
                    std::vector<std::vector<double>> rows)
        : geom_(geom), atoms_(std::move(atoms)), rows_(std::move(rows)) {
        if (atoms_.size() != rows_.size() || atoms_.empty()) {
            throw ContractError("ClassifierTable: atom/row mismatch or empty table");
        }
        const std::size_t width = rows_.front().size();
        if (width != kRotationCount && width != kRotationCount + 1) {
            throw ContractError("ClassifierTable: rows must have K or K+1 entries");
        }
        for (const auto& row : rows_) {
            if (row.size() != width) {
                throw ContractError("ClassifierTable: ragged rows");
            }
            double total = 0.0;
            for (double v : row) {
                if (v < 0.0) throw ContractError("ClassifierTable: negative entry");
                total += v;
            }
            if (std::fabs(total - 1.0) > 1e-12) {
                throw ContractError("ClassifierTable: row sums to " + std::to_string(total));
            }
        }
    }

    const SampleGeometry& geometry() const { return geom_; }
    const std::vector<std::vector<double>>& atoms() const { return atoms_; }
    const std::vector<std::vector<double>>& rows() const { return rows_; }
    std::size_t size() const { return atoms_.size(); }
    std::size_t class_count() const { return rows_.front().size(); }
    bool has_fake_class() const { return class_count() == kRotationCount + 1; }

    int find(const std::vector<double>& atom) const {
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            if (atoms_equal(atoms_[i], atom)) return static_cast<int>(i);
        }
        return -1;
    }

private:
    SampleGeometry geom_;
    std::vector<std::vector<double>> atoms_;
    std::vector<std::vector<double>> rows_;
};

}  // namespace msgl
