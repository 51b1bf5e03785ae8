#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "mld/dataset.hpp"

namespace mld {

/// Imbalance characterization of one dataset. Labels that never occur have no
/// imbalance ratio; they are excluded from mean_ir and minority_labels and
/// their irlbl slot holds a quiet NaN.
struct ImbalanceProfile {
    std::vector<std::size_t> label_counts;
    std::vector<double> irlbl;
    double mean_ir = 0.0;
    double scumble = 0.0;
    std::vector<double> scumble_per_instance;
    std::vector<std::size_t> minority_labels;  // indices with irlbl > mean_ir
    double card = 0.0;
    double dens = 0.0;

    bool is_minority(std::size_t label) const;
};

/// Computes the whole profile in one pass (fixed summation order).
ImbalanceProfile compute_profile(const MultilabelDataset& ds);

/// Mean number of active labels per instance. Throws on an empty dataset.
double cardinality(const MultilabelDataset& ds);

/// cardinality / |L|.
double density(const MultilabelDataset& ds);

/// Imbalance ratio of one label: max label count over this label's count.
/// Throws Error for a zero-count label (the ratio is undefined there).
double irlbl(const MultilabelDataset& ds, std::size_t label);

/// Mean of irlbl over labels with nonzero count. Throws if every label has
/// zero count.
double mean_ir(const MultilabelDataset& ds);

/// (global SCUMBLE, per-instance SCUMBLE). Per instance: 1 minus the ratio of
/// geometric to arithmetic mean of irlbl over the instance's active labels;
/// instances with no active labels contribute 0.
std::pair<double, std::vector<double>> scumble(const MultilabelDataset& ds);

/// Labels with irlbl strictly above mean_ir.
std::vector<std::size_t> minority_labels(const MultilabelDataset& ds);

/// Percentage reduction of MeanIR: 100 * (before - after) / before.
/// Positive values mean the imbalance level improved.
double meanir_improvement(double before, double after);

}  // namespace mld
