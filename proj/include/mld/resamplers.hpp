#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mld/codec.hpp"
#include "mld/dataset.hpp"
#include "mld/diffusion.hpp"

namespace mld {

/// What a resampling run did: sizes, imbalance change, per-phase wall time.
struct ResamplingReport {
    std::string algorithm;
    double p = 0.0;  // percentage parameter, 0 when unused
    int k = 0;       // neighbor parameter, 0 when unused
    std::uint64_t seed = 0;

    std::size_t input_size = 0;
    std::size_t output_size = 0;
    std::size_t synthetic_count = 0;

    double mean_ir_before = 0.0;
    double mean_ir_after = 0.0;
    double improvement_pct = 0.0;

    double fit_seconds = 0.0;       // model/codec construction; 0 for one-phase methods
    double generate_seconds = 0.0;  // instance creation

    bool warning = false;
    std::vector<std::string> notes;

    /// Extra bookkeeping for the diffusion method.
    std::size_t attempts = 0;
    std::size_t fallbacks = 0;

    nlohmann::json to_json(bool include_timings = true) const;
};

using ResampleResult = std::pair<MultilabelDataset, ResamplingReport>;

/// The fitted MLDM pipeline: frozen minority-label set, codec fitted on the
/// minority subset, and the trained diffusion model. Splitting fit from
/// generate lets one model serve several generation runs.
class MldmModel {
  public:
    static MldmModel fit(const MultilabelDataset& ds, const DiffusionConfig& config,
                         std::uint64_t seed);

    struct Generated {
        std::vector<std::vector<double>> rows;
        std::vector<std::vector<std::uint8_t>> labelsets;
        std::size_t attempts = 0;
        std::size_t fallbacks = 0;
    };

    /// Draws decoded instances until `count` are accepted. An instance is
    /// accepted iff its labelset contains at least one frozen minority label;
    /// after 10 * count rejected-inclusive attempts the highest-scoring
    /// minority label is forced present instead of resampling further.
    Generated generate(std::size_t count, std::uint64_t seed) const;

    const std::vector<std::size_t>& minority() const { return minority_; }
    const ColumnCodec& codec() const { return codec_; }
    const DiffusionModel& model() const { return model_; }
    std::size_t train_subset_size() const { return train_subset_size_; }

    void save(const std::string& model_path) const;
    static MldmModel load(const std::string& model_path);

  private:
    ColumnCodec codec_;
    DiffusionModel model_;
    std::vector<std::size_t> minority_;
    std::size_t train_subset_size_ = 0;
};

/// The diffusion oversampler: trains one model on the minority subset and
/// appends round(p/100 * |ds|) accepted synthetic instances.
ResampleResult mldm_resample(const MultilabelDataset& ds, double p,
                             const DiffusionConfig& config, std::uint64_t seed,
                             const MldmModel* prefitted = nullptr);

/// Random labelset cloning: labelset bags below the mean bag size receive
/// clones of their own instances until the quota or the mean size is reached.
ResampleResult lpros(const MultilabelDataset& ds, double p, std::uint64_t seed);

/// Random label cloning: instances carrying minority labels are cloned, with
/// the imbalance profile refreshed every 10 clones.
ResampleResult mlros(const MultilabelDataset& ds, double p, std::uint64_t seed);

/// Nearest-neighbor synthesis: per minority label, every carrier seeds one
/// synthetic instance interpolated toward a random reference neighbor, with
/// the labelset decided by a majority ranking over seed + neighbors.
ResampleResult mlsmote(const MultilabelDataset& ds, int k, std::uint64_t seed);

/// Labelset decoupling: instances with above-average SCUMBLE are replaced by
/// a majority-labels copy and a minority-labels copy. Deterministic.
ResampleResult remedial(const MultilabelDataset& ds);

}  // namespace mld
