#include "mld/mlknn.hpp"

#include <numeric>

#include "mld/error.hpp"

namespace mld {

MlknnModel MlknnModel::train(const MultilabelDataset& ds, int k, double smoothing) {
    if (k < 1) throw ConfigError("mlknn k must be at least 1");
    if (ds.size() <= static_cast<std::size_t>(k)) {
        throw Error("mlknn needs more than k=" + std::to_string(k) + " training instances, got " +
                    std::to_string(ds.size()));
    }
    if (!(smoothing > 0.0)) throw ConfigError("mlknn smoothing must be positive");
    return MlknnModel(ds, k, smoothing);
}

MlknnModel::MlknnModel(const MultilabelDataset& ds, int k, double smoothing)
    : train_(ds), distance_(ds), k_(k) {
    const std::size_t n = ds.size();
    const std::size_t nl = ds.label_count();
    all_indices_.resize(n);
    std::iota(all_indices_.begin(), all_indices_.end(), std::size_t{0});

    std::vector<std::size_t> counts(nl, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < nl; ++l) counts[l] += ds.has_label(i, l) ? 1 : 0;
    }
    prior_.resize(nl);
    for (std::size_t l = 0; l < nl; ++l) {
        prior_[l] = (smoothing + double(counts[l])) / (2.0 * smoothing + double(n));
    }

    // Leave-one-out neighbor evidence: c_present[l][j] counts training
    // instances carrying l whose k neighbors include exactly j carriers of l.
    const auto bins = static_cast<std::size_t>(k) + 1;
    std::vector<std::vector<std::size_t>> c_present(nl, std::vector<std::size_t>(bins, 0));
    std::vector<std::vector<std::size_t>> c_absent(nl, std::vector<std::size_t>(bins, 0));
    for (std::size_t i = 0; i < n; ++i) {
        const auto neighbors = distance_.nearest(ds, ds.row(i), all_indices_,
                                                 static_cast<std::size_t>(k), i);
        std::vector<std::size_t> positive(nl, 0);
        for (auto nb : neighbors) {
            for (std::size_t l = 0; l < nl; ++l) positive[l] += ds.has_label(nb, l) ? 1 : 0;
        }
        for (std::size_t l = 0; l < nl; ++l) {
            if (ds.has_label(i, l)) {
                ++c_present[l][positive[l]];
            } else {
                ++c_absent[l][positive[l]];
            }
        }
    }

    cond_present_.assign(nl, std::vector<double>(bins, 0.0));
    cond_absent_.assign(nl, std::vector<double>(bins, 0.0));
    for (std::size_t l = 0; l < nl; ++l) {
        double total_p = 0.0, total_a = 0.0;
        for (std::size_t j = 0; j < bins; ++j) {
            total_p += double(c_present[l][j]);
            total_a += double(c_absent[l][j]);
        }
        for (std::size_t j = 0; j < bins; ++j) {
            cond_present_[l][j] =
                (smoothing + double(c_present[l][j])) / (smoothing * double(bins) + total_p);
            cond_absent_[l][j] =
                (smoothing + double(c_absent[l][j])) / (smoothing * double(bins) + total_a);
        }
    }
}

Prediction MlknnModel::predict(const std::vector<double>& features) const {
    if (features.size() != train_.feature_count()) {
        throw SchemaError("query row width does not match the training schema");
    }
    const auto neighbors = distance_.nearest(train_, features, all_indices_,
                                             static_cast<std::size_t>(k_));
    const std::size_t nl = train_.label_count();
    Prediction out;
    out.bipartition.resize(nl);
    out.scores.resize(nl);
    for (std::size_t l = 0; l < nl; ++l) {
        std::size_t j = 0;
        for (auto nb : neighbors) j += train_.has_label(nb, l) ? 1 : 0;
        const double with = prior_[l] * cond_present_[l][j];
        const double without = (1.0 - prior_[l]) * cond_absent_[l][j];
        out.scores[l] = with / (with + without);
        out.bipartition[l] = out.scores[l] > 0.5 ? 1 : 0;
    }
    return out;
}

std::vector<Prediction> MlknnModel::predict_all(const MultilabelDataset& test) const {
    std::vector<Prediction> out;
    out.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) out.push_back(predict(test.row(i)));
    return out;
}

}  // namespace mld
