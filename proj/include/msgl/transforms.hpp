#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "msgl/error.hpp"
#include "msgl/rng.hpp"
#include "msgl/tensor.hpp"

namespace msgl {

/// The transformation family is the cyclic group of quarter-turn rotations.
/// Index k in [1,4] rotates counterclockwise by 90*(k-1) degrees; k=1 is the
/// identity.
inline constexpr int kRotationCount = 4;

inline void check_rotation(int k) {
    if (k < 1 || k > kRotationCount) {
        throw ContractError("rotation index " + std::to_string(k) + " outside [1,4]");
    }
}

/// Applying j then k equals this single rotation.
inline int compose_rotations(int j, int k) {
    check_rotation(j);
    check_rotation(k);
    return ((j - 1 + k - 1) % kRotationCount) + 1;
}

inline int inverse_rotation(int k) {
    check_rotation(k);
    return ((kRotationCount - (k - 1)) % kRotationCount) + 1;
}

/// What one row of a sample batch represents, and hence how it rotates.
struct SampleGeometry {
    enum class Kind { Point2D, Image };

    Kind kind = Kind::Point2D;
    int side = 0;      // image height == width
    int channels = 1;  // image channels

    static SampleGeometry point2d() { return SampleGeometry{}; }

    static SampleGeometry image(int side, int channels = 1) {
        if (side <= 0 || channels <= 0) {
            throw ShapeError("SampleGeometry: image side and channels must be positive");
        }
        return SampleGeometry{Kind::Image, side, channels};
    }

    std::size_t dim() const {
        return kind == Kind::Point2D
                   ? 2
                   : static_cast<std::size_t>(side) * static_cast<std::size_t>(side) *
                         static_cast<std::size_t>(channels);
    }

    bool operator==(const SampleGeometry&) const = default;
};

/// Rotate a point about the origin: k=2 maps (x,y) -> (-y,x).
inline std::array<double, 2> rotate_point(std::array<double, 2> p, int k) {
    check_rotation(k);
    for (int i = 1; i < k; ++i) {
        p = {-p[1], p[0]};
    }
    return p;
}

/// One counterclockwise quarter turn of an HxWxC row-major image:
/// out[r][c] = in[c][H-1-r], applied channelwise.
inline void rotate_image_quarter(const double* in, double* out, int side, int channels) {
    for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
            const double* src = in + (static_cast<std::size_t>(c) * side + (side - 1 - r)) * channels;
            double* dst = out + (static_cast<std::size_t>(r) * side + c) * channels;
            for (int ch = 0; ch < channels; ++ch) dst[ch] = src[ch];
        }
    }
}

/// Rotate a square image by 90*(k-1) degrees counterclockwise.
inline std::vector<double> rotate_image(const std::vector<double>& image, int side, int channels,
                                        int k) {
    check_rotation(k);
    std::size_t n = static_cast<std::size_t>(side) * side * channels;
    if (image.size() != n) {
        throw ShapeError("rotate_image: buffer size does not match side*side*channels");
    }
    std::vector<double> cur = image;
    std::vector<double> next(n);
    for (int i = 1; i < k; ++i) {
        rotate_image_quarter(cur.data(), next.data(), side, channels);
        cur.swap(next);
    }
    return cur;
}

/// Rotate one flat sample row according to its geometry.
inline void rotate_sample(const double* in, double* out, const SampleGeometry& geom, int k) {
    check_rotation(k);
    if (geom.kind == SampleGeometry::Kind::Point2D) {
        std::array<double, 2> p = rotate_point({in[0], in[1]}, k);
        out[0] = p[0];
        out[1] = p[1];
        return;
    }
    std::size_t n = geom.dim();
    std::vector<double> cur(in, in + n);
    std::vector<double> next(n);
    for (int i = 1; i < k; ++i) {
        rotate_image_quarter(cur.data(), next.data(), geom.side, geom.channels);
        cur.swap(next);
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = cur[i];
}

/// A batch of rotated samples with their pseudo-labels.
struct AugmentedBatch {
    Tensor inputs;            // m x dim
    std::vector<int> labels;  // rotation index per row, in [1,4]
};

enum class AugmentPolicy {
    RandomOne,  // one seeded-uniform rotation per sample (training path)
    AllK,       // replicate each sample under every rotation (analysis path)
};

/// Apply the labels' rotations row by row.
inline Tensor apply_rotations(const Tensor& batch, const std::vector<int>& labels,
                              const SampleGeometry& geom) {
    if (batch.rank() != 2 || batch.cols() != geom.dim()) {
        throw ShapeError("apply_rotations: batch rows must match sample geometry");
    }
    if (labels.size() != batch.rows()) {
        throw ContractError("apply_rotations: one label per row required");
    }
    Tensor out({batch.rows(), batch.cols()});
    for (std::size_t r = 0; r < batch.rows(); ++r) {
        rotate_sample(&batch.values()[r * batch.cols()], &out.values()[r * batch.cols()], geom,
                      labels[r]);
    }
    return out;
}

/// Build the pseudo-labelled rotation batch. RandomOne draws one rotation per
/// sample; AllK emits 4n rows ordered sample-major (labels 1..4 per sample).
/// The label sequence is part of the result so the same rotations can be
/// replayed on a paired batch.
inline AugmentedBatch augment_batch(const Tensor& batch, const SampleGeometry& geom,
                                    AugmentPolicy policy, std::uint64_t seed) {
    if (batch.rank() != 2 || batch.rows() == 0) {
        throw ContractError("augment_batch: batch must be a non-empty rank-2 tensor");
    }
    if (batch.cols() != geom.dim()) {
        throw ShapeError("augment_batch: row width does not match sample geometry");
    }
    std::vector<int> labels;
    Tensor source = batch;
    if (policy == AugmentPolicy::RandomOne) {
        Rng rng = Rng::stream(seed, rng_stream::kAugment);
        labels.resize(batch.rows());
        for (int& k : labels) k = static_cast<int>(rng.below(kRotationCount)) + 1;
    } else {
        labels.reserve(batch.rows() * kRotationCount);
        Tensor replicated({batch.rows() * kRotationCount, batch.cols()});
        for (std::size_t r = 0; r < batch.rows(); ++r) {
            for (int k = 1; k <= kRotationCount; ++k) {
                std::size_t dst = (r * kRotationCount + (k - 1)) * batch.cols();
                for (std::size_t c = 0; c < batch.cols(); ++c) {
                    replicated.values()[dst + c] = batch.values()[r * batch.cols() + c];
                }
                labels.push_back(k);
            }
        }
        source = std::move(replicated);
    }
    return AugmentedBatch{apply_rotations(source, labels, geom), std::move(labels)};
}

}  // namespace msgl
