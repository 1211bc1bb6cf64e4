#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "msgl/autodiff.hpp"
#include "msgl/error.hpp"
#include "msgl/losses.hpp"
#include "msgl/metrics.hpp"
#include "msgl/nn.hpp"
#include "msgl/rng.hpp"
#include "msgl/tensor.hpp"
#include "msgl/transforms.hpp"

namespace msgl {

/// Known mode locations of a point dataset. A sample belongs to a mode if it
/// falls within assign_radius of that mode's center.
struct ModeSpec {
    std::vector<std::array<double, 2>> centers;
    double assign_radius = 0.0;
};

/// Covered-mode count and divergence of the assigned-mode histogram from
/// uniform. kl_defined is false when nothing was assigned.
struct ModeReport {
    std::size_t covered = 0;
    double kl = 0.0;
    bool kl_defined = false;
    double assigned_fraction = 0.0;
};

namespace detail {

inline ModeReport report_from_histogram(const std::vector<std::size_t>& hist,
                                        std::size_t total_samples) {
    ModeReport report;
    std::size_t assigned = 0;
    for (std::size_t c : hist) {
        if (c > 0) ++report.covered;
        assigned += c;
    }
    report.assigned_fraction =
        total_samples == 0 ? 0.0 : static_cast<double>(assigned) / total_samples;
    if (assigned == 0) return report;
    const double m = static_cast<double>(hist.size());
    double kl = 0.0;
    for (std::size_t c : hist) {
        if (c == 0) continue;
        const double h = static_cast<double>(c) / static_cast<double>(assigned);
        kl += h * std::log(h * m);
    }
    report.kl = kl;
    report.kl_defined = true;
    return report;
}

}  // namespace detail

/// Assign each 2-D sample to its nearest center within the radius and report
/// coverage plus the histogram-vs-uniform KL (natural log).
inline ModeReport mode_coverage(const Tensor& samples, const ModeSpec& spec) {
    if (samples.rank() != 2 || samples.cols() != 2 || samples.rows() == 0) {
        throw ContractError("mode_coverage: non-empty n x 2 samples required");
    }
    if (spec.centers.empty()) throw ContractError("mode_coverage: empty mode spec");
    std::vector<std::size_t> hist(spec.centers.size(), 0);
    for (std::size_t i = 0; i < samples.rows(); ++i) {
        const double x = samples.at(i, 0);
        const double y = samples.at(i, 1);
        double best = spec.assign_radius;
        int best_mode = -1;
        for (std::size_t m = 0; m < spec.centers.size(); ++m) {
            const double d = std::hypot(x - spec.centers[m][0], y - spec.centers[m][1]);
            if (d <= best) {
                best = d;
                best_mode = static_cast<int>(m);
            }
        }
        if (best_mode >= 0) ++hist[static_cast<std::size_t>(best_mode)];
    }
    return detail::report_from_histogram(hist, samples.rows());
}

/// Coverage over precomputed mode codes (the stacked-digit path).
inline ModeReport mode_coverage_codes(const std::vector<int>& codes, std::size_t mode_count) {
    if (codes.empty() || mode_count == 0) {
        throw ContractError("mode_coverage_codes: empty input");
    }
    std::vector<std::size_t> hist(mode_count, 0);
    std::size_t total = 0;
    for (int c : codes) {
        ++total;
        if (c >= 0 && static_cast<std::size_t>(c) < mode_count) {
            ++hist[static_cast<std::size_t>(c)];
        }
    }
    return detail::report_from_histogram(hist, total);
}

/// Mean rotation-task loss of each sample set under a fixed classifier,
/// evaluated over the full all-rotations augmentation. multiclass selects
/// the (K+1)-class loss (rotation CE minus the fake-class reward) versus the
/// plain rotation CE. Sets are returned in input order.
inline std::vector<double> loophole_set_losses(const Mlp& classifier,
                                               const std::vector<Tensor>& sets,
                                               const SampleGeometry& geom, bool multiclass) {
    std::vector<double> means;
    means.reserve(sets.size());
    for (const Tensor& set : sets) {
        AugmentedBatch aug = augment_batch(set, geom, AugmentPolicy::AllK, 0);
        Tape t;
        Tape::NodeId logits = mlp_forward_frozen(t, classifier, t.leaf(aug.inputs));
        Tape::NodeId loss = multiclass ? ms_phi_loss(t, logits, aug.labels)
                                       : ss_phi_loss(t, logits, aug.labels);
        means.push_back(t.scalar_value(loss));
    }
    return means;
}

/// Multinomial logistic regression on frozen features, full-batch gradient
/// descent, top-1 accuracy on the held-out split.
inline double linear_probe(const Tensor& train_features, const std::vector<int>& train_labels,
                           const Tensor& test_features, const std::vector<int>& test_labels,
                           std::size_t epochs = 500, double lr = 0.1) {
    if (train_features.rank() != 2 || train_features.rows() != train_labels.size() ||
        test_features.rows() != test_labels.size() || train_labels.empty() ||
        test_labels.empty()) {
        throw ContractError("linear_probe: features/labels mismatch");
    }
    int max_label = 0;
    for (int l : train_labels) max_label = std::max(max_label, l);
    for (int l : test_labels) max_label = std::max(max_label, l);
    const std::size_t classes = static_cast<std::size_t>(max_label) + 1;
    if (classes < 2) throw ContractError("linear_probe: at least two classes required");
    std::vector<std::size_t> train_cols(train_labels.begin(), train_labels.end());

    const std::size_t dim = train_features.cols();
    ParamSet params;
    params.add("w", Tensor({dim, classes}));
    params.add("b", Tensor({1, classes}));
    for (std::size_t e = 0; e < epochs; ++e) {
        Tape t;
        Tape::NodeId logits = t.add(t.matmul(t.leaf(train_features), t.param(params.at("w"))),
                                    t.param(params.at("b")));
        Tape::NodeId loss =
            t.scale(t.mean(t.log(t.pick(t.softmax(logits), train_cols))), -1.0);
        t.backward(loss);
        for (auto& [name, tensor] : params) {
            const auto& g = tensor.grad();
            for (std::size_t i = 0; i < tensor.size(); ++i) tensor[i] -= lr * g[i];
        }
    }

    Tape t;
    const Tensor& scores = t.value(t.add(
        t.matmul(t.leaf(test_features), t.leaf(params.at("w"))), t.leaf(params.at("b"))));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        std::size_t arg = 0;
        for (std::size_t c = 1; c < classes; ++c) {
            if (scores.at(i, c) > scores.at(i, arg)) arg = c;
        }
        if (static_cast<int>(arg) == test_labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(test_labels.size());
}

/// Deterministic sample dump: scatter CSV for point generators.
inline void write_scatter_csv(const Tensor& samples, const std::string& path) {
    if (samples.rank() != 2 || samples.cols() != 2) {
        throw ContractError("write_scatter_csv: n x 2 samples required");
    }
    std::ostringstream out;
    out << "x,y\n";
    for (std::size_t i = 0; i < samples.rows(); ++i) {
        out << detail::format_double(samples.at(i, 0)) << ','
            << detail::format_double(samples.at(i, 1)) << '\n';
    }
    detail::atomic_write(path, out.str());
}

/// Tile image samples into one 8-bit binary PGM (square-ish grid, row-major,
/// channels averaged to gray).
inline void write_image_grid_pgm(const Tensor& samples, const SampleGeometry& geom,
                                 const std::string& path) {
    if (geom.kind != SampleGeometry::Kind::Image || samples.cols() != geom.dim() ||
        samples.rows() == 0) {
        throw ContractError("write_image_grid_pgm: image batch required");
    }
    const std::size_t n = samples.rows();
    const std::size_t side = static_cast<std::size_t>(geom.side);
    std::size_t tiles = 1;
    while (tiles * tiles < n) ++tiles;
    const std::size_t tile_rows = (n + tiles - 1) / tiles;
    const std::size_t width = tiles * side;
    const std::size_t height = tile_rows * side;
    std::vector<unsigned char> pixels(width * height, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t tr = i / tiles, tc = i % tiles;
        for (std::size_t r = 0; r < side; ++r) {
            for (std::size_t c = 0; c < side; ++c) {
                double v = 0.0;
                for (int ch = 0; ch < geom.channels; ++ch) {
                    v += samples.at(i, (r * side + c) * geom.channels + ch);
                }
                v /= geom.channels;
                v = std::clamp(v, 0.0, 1.0);
                pixels[(tr * side + r) * width + tc * side + c] =
                    static_cast<unsigned char>(std::lround(v * 255.0));
            }
        }
    }
    std::ostringstream out;
    out << "P5\n" << width << ' ' << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
    detail::atomic_write(path, out.str());
}

/// Draw n generator samples deterministically and dump them (CSV or PGM by
/// geometry). Returns the samples.
inline Tensor sample_grid(const Mlp& generator, std::size_t n, std::uint64_t seed,
                          const SampleGeometry& geom, const std::string& path) {
    if (n == 0) throw ContractError("sample_grid: n must be positive");
    Rng rng = Rng::stream(seed, rng_stream::kEval);
    Tensor z({n, generator.input_dim()});
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = rng.uniform();
    Tensor samples = mlp_apply(generator, z);
    if (geom.kind == SampleGeometry::Kind::Point2D) {
        write_scatter_csv(samples, path);
    } else {
        write_image_grid_pgm(samples, geom, path);
    }
    return samples;
}

}  // namespace msgl
