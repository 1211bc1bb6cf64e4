#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "msgl/autodiff.hpp"
#include "msgl/error.hpp"
#include "msgl/tensor.hpp"
#include "msgl/transforms.hpp"

namespace msgl {

/// All builders return scalar loss nodes that the respective player
/// minimizes; value-function signs are already folded in.

namespace detail {

inline void check_logits(const Tape& t, Tape::NodeId logits, std::size_t min_cols,
                         const char* who) {
    const Tensor& v = t.value(logits);
    if (v.rank() != 2 || v.rows() == 0) {
        throw ContractError(std::string(who) + ": non-empty rank-2 logits required");
    }
    if (v.cols() < min_cols) {
        throw ContractError(std::string(who) + ": logits need at least " +
                            std::to_string(min_cols) + " columns");
    }
}

inline std::vector<std::size_t> label_columns(const std::vector<int>& labels,
                                              std::size_t rows, const char* who) {
    if (labels.size() != rows) {
        throw ContractError(std::string(who) + ": one label per row required");
    }
    std::vector<std::size_t> cols(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 1 || labels[i] > kRotationCount) {
            throw ContractError(std::string(who) + ": label outside [1,4]");
        }
        cols[i] = static_cast<std::size_t>(labels[i] - 1);
    }
    return cols;
}

inline Tape::NodeId mean_log_class(Tape& t, Tape::NodeId class_logits,
                                   std::vector<std::size_t> cols) {
    return t.mean(t.log(t.pick(t.softmax(class_logits), std::move(cols))));
}

}  // namespace detail

/// Discriminator side of the original value function:
/// -mean log s(rf_real) - mean log(1 - s(rf_fake)).
inline Tape::NodeId gan_d_loss(Tape& t, Tape::NodeId rf_real, Tape::NodeId rf_fake) {
    detail::check_logits(t, rf_real, 1, "gan_d_loss");
    detail::check_logits(t, rf_fake, 1, "gan_d_loss");
    Tape::NodeId real_term = t.scale(t.mean(t.log(t.sigmoid(rf_real))), -1.0);
    Tape::NodeId ones = t.leaf(Tensor::full(t.value(rf_fake).shape(), 1.0));
    Tape::NodeId fake_term = t.scale(t.mean(t.log(t.sub(ones, t.sigmoid(rf_fake)))), -1.0);
    return t.add(real_term, fake_term);
}

/// Non-saturating generator loss: -mean log s(rf_fake).
inline Tape::NodeId gan_g_loss(Tape& t, Tape::NodeId rf_fake) {
    detail::check_logits(t, rf_fake, 1, "gan_g_loss");
    return t.scale(t.mean(t.log(t.sigmoid(rf_fake))), -1.0);
}

/// Mean rotation cross-entropy of rotated real samples (discriminator's
/// plain-game auxiliary loss; minimizing it maximizes the rotation value).
inline Tape::NodeId ss_psi_loss(Tape& t, Tape::NodeId class_logits_real,
                                const std::vector<int>& labels) {
    detail::check_logits(t, class_logits_real, kRotationCount, "ss_psi_loss");
    auto cols = detail::label_columns(labels, t.value(class_logits_real).rows(), "ss_psi_loss");
    return t.scale(detail::mean_log_class(t, class_logits_real, std::move(cols)), -1.0);
}

/// Same form on rotated fake samples; the generator step minimizes it with
/// the classifier held fixed.
inline Tape::NodeId ss_phi_loss(Tape& t, Tape::NodeId class_logits_fake,
                                const std::vector<int>& labels) {
    detail::check_logits(t, class_logits_fake, kRotationCount, "ss_phi_loss");
    auto cols = detail::label_columns(labels, t.value(class_logits_fake).rows(), "ss_phi_loss");
    return t.scale(detail::mean_log_class(t, class_logits_fake, std::move(cols)), -1.0);
}

/// Multi-class discriminator auxiliary: rotated reals classified into their
/// rotation class, rotated fakes into the (K+1)-th fake class.
inline Tape::NodeId ms_psi_loss(Tape& t, Tape::NodeId class_logits_real,
                                const std::vector<int>& labels,
                                Tape::NodeId class_logits_fake) {
    detail::check_logits(t, class_logits_real, kRotationCount + 1, "ms_psi_loss");
    detail::check_logits(t, class_logits_fake, kRotationCount + 1, "ms_psi_loss");
    auto cols = detail::label_columns(labels, t.value(class_logits_real).rows(), "ms_psi_loss");
    Tape::NodeId real_term =
        t.scale(detail::mean_log_class(t, class_logits_real, std::move(cols)), -1.0);
    std::vector<std::size_t> fake_cols(t.value(class_logits_fake).rows(), kRotationCount);
    Tape::NodeId fake_term =
        t.scale(detail::mean_log_class(t, class_logits_fake, std::move(fake_cols)), -1.0);
    return t.add(real_term, fake_term);
}

/// Multi-class generator auxiliary: push rotated fakes toward their true
/// rotation class and away from the fake class.
inline Tape::NodeId ms_phi_loss(Tape& t, Tape::NodeId class_logits_fake,
                                const std::vector<int>& labels) {
    detail::check_logits(t, class_logits_fake, kRotationCount + 1, "ms_phi_loss");
    auto cols = detail::label_columns(labels, t.value(class_logits_fake).rows(), "ms_phi_loss");
    Tape::NodeId true_term =
        t.scale(detail::mean_log_class(t, class_logits_fake, std::move(cols)), -1.0);
    std::vector<std::size_t> fake_cols(t.value(class_logits_fake).rows(), kRotationCount);
    Tape::NodeId fake_term = detail::mean_log_class(t, class_logits_fake, std::move(fake_cols));
    return t.add(true_term, fake_term);
}

/// The two per-batch statistics the matching objective compares. Labels are
/// kept so the pairing precondition can be enforced.
struct SsStats {
    Tape::NodeId mean_log_true_class;
    Tape::NodeId mean_log_fake_class;
    std::vector<int> labels;
};

inline SsStats ss_stats(Tape& t, Tape::NodeId class_logits, const std::vector<int>& labels) {
    detail::check_logits(t, class_logits, kRotationCount + 1, "ss_stats");
    auto cols = detail::label_columns(labels, t.value(class_logits).rows(), "ss_stats");
    Tape::NodeId sm = t.softmax(class_logits);
    SsStats stats;
    stats.mean_log_true_class = t.mean(t.log(t.pick(sm, std::move(cols))));
    std::vector<std::size_t> fake_cols(t.value(class_logits).rows(), kRotationCount);
    stats.mean_log_fake_class = t.mean(t.log(t.pick(sm, std::move(fake_cols))));
    stats.labels = labels;
    return stats;
}

/// The practical generator objective: match the fake batch's rotation
/// statistics to the real batch's, in l1 norm. Both batches must have been
/// rotated by the same label sequence.
inline Tape::NodeId ms_matching_loss(Tape& t, const SsStats& fake, const SsStats& real) {
    if (fake.labels != real.labels) {
        throw ContractError("ms_matching_loss: real/fake batches must share the rotation "
                            "sequence (size and order)");
    }
    Tape::NodeId fake_gap = t.sub(fake.mean_log_true_class, fake.mean_log_fake_class);
    Tape::NodeId real_gap = t.sub(real.mean_log_true_class, real.mean_log_fake_class);
    return t.abs(t.sub(fake_gap, real_gap));
}

}  // namespace msgl
