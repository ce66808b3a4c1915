#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mfseg/image.hpp"

namespace mfseg {

/// Overlap metrics of a predicted mask against ground truth.
///
/// Zero-denominator conventions: empty prediction against non-empty truth
/// gives precision 0; empty truth against non-empty prediction gives recall
/// 0; two empty masks agree perfectly (all three metrics 1, `degenerate`
/// set); f_value is 0 whenever precision + recall is 0.
struct MetricsRecord {
    double precision = 0.0;
    double recall = 0.0;
    double f_value = 0.0;
    std::size_t true_positive = 0;
    std::size_t predicted_area = 0;
    std::size_t truth_area = 0;
    double elapsed_seconds = 0.0;
    bool degenerate = false;
};

/// Pixel-wise precision / recall / F of pred against truth.
/// Throws std::invalid_argument on shape mismatch.
MetricsRecord compare_masks(const BinaryMask& pred, const BinaryMask& truth);

struct TaggedRecord {
    std::string image_id;
    std::string model;
    MetricsRecord metrics;
};

/// Per-model aggregate, the "Ave." row of a benchmark table.
struct ModelSummary {
    std::string model;
    double mean_f = 0.0;
    double mean_elapsed_seconds = 0.0;
    std::size_t runs = 0;
};

/// Groups records by model (in order of first appearance) and averages F and
/// elapsed time. Throws std::invalid_argument on empty input.
std::vector<ModelSummary> timing_summary(const std::vector<TaggedRecord>& records);

} // namespace mfseg
