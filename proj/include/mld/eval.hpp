#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mld/dataset.hpp"
#include "mld/diffusion.hpp"
#include "mld/mlknn.hpp"
#include "mld/resamplers.hpp"

namespace mld {

// Bipartition metrics. `truths` and `preds` are parallel binary label rows.

/// Mean symmetric-difference size over |L| (lower is better).
double hamming_loss(const std::vector<std::vector<std::uint8_t>>& truths,
                    const std::vector<std::vector<std::uint8_t>>& preds);

/// Harmonic mean of the sample-averaged precision and recall. An instance
/// with an empty prediction contributes precision 0; an empty truth set
/// contributes recall 0.
double f1_sample(const std::vector<std::vector<std::uint8_t>>& truths,
                 const std::vector<std::vector<std::uint8_t>>& preds);

/// Per-label F1 averaged over labels; zero-denominator labels contribute 0.
double macro_f1(const std::vector<std::vector<std::uint8_t>>& truths,
                const std::vector<std::vector<std::uint8_t>>& preds);

/// F1 of the label-summed confusion counts.
double micro_f1(const std::vector<std::vector<std::uint8_t>>& truths,
                const std::vector<std::vector<std::uint8_t>>& preds);

struct OneErrorResult {
    double value = 0.0;
    std::size_t skipped = 0;  // instances with empty truth sets
};

/// Fraction of instances whose top-scoring label (ties to the lowest index)
/// is not relevant. Instances with empty truth sets are skipped and tallied.
OneErrorResult one_error(const std::vector<std::vector<std::uint8_t>>& truths,
                         const std::vector<std::vector<double>>& scores);

// ---------------------------------------------------------------------------
// Cross-validation driver
// ---------------------------------------------------------------------------

inline constexpr std::array<const char*, 5> kMetricNames = {"HL", "F1", "MacroF1",
                                                            "MicroF1", "OE"};
/// Direction per metric slot: true when higher values are better.
inline constexpr std::array<bool, 5> kHigherIsBetter = {false, true, true, true, false};

struct ResamplerSpec {
    std::string method = "none";  // none|mldm|lpros|mlros|mlsmote|remedial
    double p = 25.0;
    int k = 3;
    DiffusionConfig diffusion;

    void validate() const;
};

struct ClassifierSpec {
    int k = 10;
    double smoothing = 1.0;
};

/// Runs one resampler spec on a training split (identity for "none").
ResampleResult run_resampler(const MultilabelDataset& train, const ResamplerSpec& spec,
                             std::uint64_t seed);

struct FoldMetrics {
    std::array<double, 5> values{};  // indexed like kMetricNames
    std::size_t oe_skipped = 0;
};

struct CvResult {
    std::vector<FoldMetrics> folds;
    std::array<double, 5> mean{};
    std::array<double, 5> stdev{};  // sample standard deviation over folds
    std::vector<ResamplingReport> resampling;  // one per fold
};

/// For each fold: resample the training split only, train MLkNN, score the
/// untouched test split. Fold seeds derive from `seed`, so reports are
/// reproducible; `jobs` > 1 evaluates folds in parallel with a fixed merge
/// order.
CvResult cross_validate(const FoldSet& folds, const ResamplerSpec& resampler,
                        const ClassifierSpec& classifier, std::uint64_t seed, int jobs = 1);

/// Average ranks over cells (1 = best). `cells[c][r]` is resampler r's value
/// in cell c; `higher_better[c]` gives the direction. Ties receive the mean
/// of the tied positions.
std::vector<double> average_ranks(const std::vector<std::vector<double>>& cells,
                                  const std::vector<bool>& higher_better);

/// Full evaluation grid: datasets x methods, five metrics each.
struct EvaluationReport {
    std::vector<std::string> datasets;
    std::vector<std::string> methods;
    // results[d][m] -> CvResult
    std::vector<std::vector<CvResult>> results;
    std::uint64_t seed = 0;

    /// Mean rank per method for one metric slot, over datasets.
    std::vector<double> ranks_for_metric(std::size_t metric) const;
    /// Mean rank per method over every (dataset, metric) cell.
    std::vector<double> overall_ranks() const;

    /// Deterministic JSON (no wall-clock content).
    nlohmann::json to_json() const;
    /// Aligned text tables, one per metric, mean +/- std cells, plus ranks.
    std::string to_table() const;
    std::string to_csv() const;
};

}  // namespace mld
