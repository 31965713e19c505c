#include "pam/baselines.hpp"

#include <map>

#include "pam/errors.hpp"

namespace pam {

PredictionSet persistence_predict(const TensorDataset& data) {
    PredictionSet preds;
    preds.header = data.header;
    preds.traces = trace_infos(data.tensors);
    for (std::size_t i = 0; i < data.tensors.size(); ++i) {
        const auto& t = data.tensors[i];
        if (t.window_count() < 2) {
            throw SingleWindowTrace("trace '" + t.case_id + "' has fewer than 2 windows");
        }
        const std::size_t target = t.window_count() - 1;
        for (const auto& c : t.slices[target - 1].cells) preds.records.push_back({i, target, c, 1.0});
    }
    return preds;
}

PredictionSet marginal_frequency_predict(const TensorDataset& training, const TensorDataset& targets) {
    if (training.tensors.empty()) throw EmptyTraining("marginal baseline needs training traces");
    if (!(training.header.alphabet == targets.header.alphabet) || !(training.header.profile == targets.header.profile)) {
        throw HeaderMismatch("training and target datasets use different alphabets or profiles");
    }

    std::map<Cell, std::size_t> frequency;
    for (const auto& t : training.tensors) {
        if (t.slices.empty()) continue;
        for (const auto& c : t.slices.back().cells) ++frequency[c];
    }
    const double n = static_cast<double>(training.tensors.size());

    PredictionSet preds;
    preds.header = targets.header;
    preds.traces = trace_infos(targets.tensors);
    for (std::size_t i = 0; i < targets.tensors.size(); ++i) {
        const auto& t = targets.tensors[i];
        if (t.slices.empty()) continue;
        const std::size_t target = t.window_count() - 1;
        for (const auto& [cell, count] : frequency) {
            preds.records.push_back({i, target, cell, static_cast<double>(count) / n});
        }
    }
    return preds;
}

}  // namespace pam
