#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "msgl/error.hpp"
#include "msgl/eval.hpp"
#include "msgl/rng.hpp"
#include "msgl/tensor.hpp"
#include "msgl/transforms.hpp"

namespace msgl {

/// A sampleable training distribution with known mode structure. Point
/// datasets are Gaussian mixtures; image datasets are noisy pattern modes.
struct Dataset {
    std::string name;
    SampleGeometry geom;
    double sigma = 0.05;                             // per-mode noise scale
    std::vector<std::array<double, 2>> centers;      // point modes
    std::vector<std::vector<double>> patterns;       // image modes

    std::size_t mode_count() const {
        return geom.kind == SampleGeometry::Kind::Point2D ? centers.size() : patterns.size();
    }

    bool has_mode_spec() const {
        return geom.kind == SampleGeometry::Kind::Point2D && !centers.empty();
    }

    ModeSpec mode_spec() const {
        if (!has_mode_spec()) throw ContractError("dataset '" + name + "' has no mode spec");
        return ModeSpec{centers, 3.0 * sigma};
    }
};

/// One sample from a chosen mode.
inline void sample_mode_into(const Dataset& d, std::size_t mode, Rng& rng, double* row) {
    if (mode >= d.mode_count()) throw ContractError("sample_mode: mode index out of range");
    if (d.geom.kind == SampleGeometry::Kind::Point2D) {
        row[0] = d.centers[mode][0] + d.sigma * rng.normal();
        row[1] = d.centers[mode][1] + d.sigma * rng.normal();
    } else {
        const std::vector<double>& base = d.patterns[mode];
        for (std::size_t i = 0; i < base.size(); ++i) {
            row[i] = std::clamp(base[i] + d.sigma * rng.normal(), 0.0, 1.0);
        }
    }
}

/// n samples, modes drawn uniformly.
inline Tensor sample_batch(const Dataset& d, Rng& rng, std::size_t n) {
    if (n == 0) throw ContractError("sample_batch: n must be positive");
    Tensor out({n, d.geom.dim()});
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t mode = rng.below(d.mode_count());
        sample_mode_into(d, mode, rng, &out.values()[i * d.geom.dim()]);
    }
    return out;
}

/// n samples, all from one mode (collapsed-generator stand-in).
inline Tensor sample_mode_batch(const Dataset& d, Rng& rng, std::size_t mode, std::size_t n) {
    Tensor out({n, d.geom.dim()});
    for (std::size_t i = 0; i < n; ++i) {
        sample_mode_into(d, mode, rng, &out.values()[i * d.geom.dim()]);
    }
    return out;
}

/// Ring of 8 Gaussians, radius 2, sigma 0.05.
inline Dataset make_ring8() {
    Dataset d;
    d.name = "ring8";
    d.geom = SampleGeometry::point2d();
    d.sigma = 0.05;
    for (int i = 0; i < 8; ++i) {
        const double angle = 2.0 * 3.14159265358979323846 * i / 8.0;
        d.centers.push_back({2.0 * std::cos(angle), 2.0 * std::sin(angle)});
    }
    return d;
}

/// 5x5 grid of 25 Gaussians, spacing 2, sigma 0.05. The grid is offset from
/// the origin so quarter turns move it to a disjoint region: the rotation
/// pseudo-task is informative here, unlike on an origin-centered grid.
inline Dataset make_grid25() {
    Dataset d;
    d.name = "grid25";
    d.geom = SampleGeometry::point2d();
    d.sigma = 0.05;
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            d.centers.push_back({2.0 * (i - 2) + 0.5, 2.0 * (j - 2) + 0.5});
        }
    }
    return d;
}

/// Four 6x6 grayscale pattern modes with distinct rotation behavior:
///   corner  - block in the top-left corner; its rotations are not data
///   diag    - main diagonal stripe; quarter turn gives the anti-diagonal
///   anti    - anti-diagonal stripe
///   center  - centered block, invariant under every rotation
inline Dataset make_toy_images() {
    constexpr int side = 6;
    Dataset d;
    d.name = "toyimg";
    d.geom = SampleGeometry::image(side, 1);
    d.sigma = 0.05;

    std::vector<double> corner(side * side, 0.0);
    corner[0 * side + 0] = corner[0 * side + 1] = 1.0;
    corner[1 * side + 0] = corner[1 * side + 1] = 1.0;

    std::vector<double> diag(side * side, 0.0);
    std::vector<double> anti(side * side, 0.0);
    for (int i = 0; i < side; ++i) {
        diag[i * side + i] = 1.0;
        anti[i * side + (side - 1 - i)] = 1.0;
    }

    std::vector<double> center(side * side, 0.0);
    center[2 * side + 2] = center[2 * side + 3] = 1.0;
    center[3 * side + 2] = center[3 * side + 3] = 1.0;

    d.patterns = {corner, diag, anti, center};
    return d;
}

inline Dataset make_dataset(const std::string& name) {
    if (name == "ring8") return make_ring8();
    if (name == "grid25") return make_grid25();
    if (name == "toyimg") return make_toy_images();
    throw ConfigError("unknown dataset '" + name + "'");
}

}  // namespace msgl
