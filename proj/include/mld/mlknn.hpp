#pragma once

#include <cstdint>
#include <vector>

#include "mld/dataset.hpp"
#include "mld/distance.hpp"

namespace mld {

/// A classifier's output for one instance: the thresholded label decisions
/// plus the posterior score (in [0,1], higher = more likely) per label.
struct Prediction {
    std::vector<std::uint8_t> bipartition;
    std::vector<double> scores;
};

/// Multilabel k-nearest-neighbor classifier with Bayesian posteriors: a prior
/// per label from training counts plus conditional tables over the number of
/// positive neighbors, both Laplace-smoothed.
class MlknnModel {
  public:
    /// Requires |ds| > k. Neighbor statistics are computed leave-one-out.
    static MlknnModel train(const MultilabelDataset& ds, int k = 10, double smoothing = 1.0);

    Prediction predict(const std::vector<double>& features) const;
    std::vector<Prediction> predict_all(const MultilabelDataset& test) const;

    int k() const { return k_; }
    const std::vector<double>& priors() const { return prior_; }

  private:
    MlknnModel(const MultilabelDataset& ds, int k, double smoothing);

    MultilabelDataset train_;
    FeatureDistance distance_;
    int k_;
    std::vector<std::size_t> all_indices_;
    std::vector<double> prior_;                        // P(H_l)
    std::vector<std::vector<double>> cond_present_;    // P(E_j | H_l), j in [0, k]
    std::vector<std::vector<double>> cond_absent_;     // P(E_j | not H_l)
};

}  // namespace mld
