#pragma once

#include "pam/tensor_store.hpp"

namespace pam {

// Predicts each trace's final window as a copy of its penultimate window
// (score 1 on those cells). The final slice of `data` is never read. Throws
// SingleWindowTrace.
PredictionSet persistence_predict(const TensorDataset& data);

// Scores every cell by the fraction of training traces whose final window
// contains it, for the final window of every trace in `targets`. Throws
// EmptyTraining, or HeaderMismatch when the datasets disagree.
PredictionSet marginal_frequency_predict(const TensorDataset& training, const TensorDataset& targets);

}  // namespace pam
