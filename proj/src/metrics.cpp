#include "mfseg/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace mfseg {

MetricsRecord compare_masks(const BinaryMask& pred, const BinaryMask& truth) {
    if (!pred.same_shape(truth))
        throw std::invalid_argument("compare_masks: shape mismatch");
    MetricsRecord rec;
    for (int y = 0; y < pred.height(); ++y)
        for (int x = 0; x < pred.width(); ++x) {
            const bool p = pred.at(x, y);
            const bool t = truth.at(x, y);
            rec.predicted_area += p;
            rec.truth_area += t;
            rec.true_positive += p && t;
        }
    if (rec.predicted_area == 0 && rec.truth_area == 0) {
        rec.precision = rec.recall = rec.f_value = 1.0;
        rec.degenerate = true;
        return rec;
    }
    rec.precision = rec.predicted_area == 0
                        ? 0.0
                        : static_cast<double>(rec.true_positive) /
                              static_cast<double>(rec.predicted_area);
    rec.recall = rec.truth_area == 0
                     ? 0.0
                     : static_cast<double>(rec.true_positive) /
                           static_cast<double>(rec.truth_area);
    const double pr = rec.precision + rec.recall;
    rec.f_value = pr == 0.0 ? 0.0 : 2.0 * rec.precision * rec.recall / pr;
    return rec;
}

std::vector<ModelSummary> timing_summary(
    const std::vector<TaggedRecord>& records) {
    if (records.empty())
        throw std::invalid_argument("timing_summary: no records");
    std::vector<ModelSummary> out;
    for (const TaggedRecord& rec : records) {
        auto it = std::find_if(out.begin(), out.end(), [&](const ModelSummary& s) {
            return s.model == rec.model;
        });
        if (it == out.end()) {
            out.push_back(ModelSummary{rec.model, 0.0, 0.0, 0});
            it = std::prev(out.end());
        }
        it->mean_f += rec.metrics.f_value;
        it->mean_elapsed_seconds += rec.metrics.elapsed_seconds;
        ++it->runs;
    }
    for (ModelSummary& s : out) {
        s.mean_f /= static_cast<double>(s.runs);
        s.mean_elapsed_seconds /= static_cast<double>(s.runs);
    }
    return out;
}

} // namespace mfseg
