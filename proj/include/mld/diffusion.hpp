#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mld/codec.hpp"
#include "mld/rng.hpp"

namespace mld {

/// Linear beta schedule with precomputed signal-retention products.
struct NoiseSchedule {
    int steps = 0;                  // T
    std::vector<double> beta;       // beta[t-1] for t in [1, T]
    std::vector<double> alpha;      // 1 - beta
    std::vector<double> alpha_bar;  // cumulative product of alpha

    double beta_at(int t) const { return beta[static_cast<std::size_t>(t - 1)]; }
    double alpha_at(int t) const { return alpha[static_cast<std::size_t>(t - 1)]; }
    /// alpha_bar at t, extended with alpha_bar(0) = 1 for posterior formulas.
    double alpha_bar_at(int t) const {
        return t == 0 ? 1.0 : alpha_bar[static_cast<std::size_t>(t - 1)];
    }
};

/// beta_t interpolated linearly from beta_start to beta_end over T steps.
/// Requires T >= 1 and 0 < beta_start <= beta_end < 1.
NoiseSchedule make_schedule(int steps, double beta_start, double beta_end);

/// One Gaussian forward step: sample of N(sqrt(1-beta_t) x_prev, beta_t I).
std::vector<double> forward_step(const std::vector<double>& x_prev, int t,
                                 const NoiseSchedule& schedule, Rng& rng);

/// Closed-form jump to step t: x_t = sqrt(abar_t) x0 + sqrt(1-abar_t) eps.
/// Returns (x_t, eps) so the drawn noise can serve as a training target.
std::pair<std::vector<double>, std::vector<double>> forward_jump(
    const std::vector<double>& x0, int t, const NoiseSchedule& schedule, Rng& rng);

/// One multinomial forward step on a one-hot block:
/// Categorical((1-beta_t) x_prev + beta_t / K).
std::vector<double> categorical_forward(std::span<const double> onehot, int t,
                                        const NoiseSchedule& schedule, Rng& rng);

/// Accumulated multinomial jump: Categorical(abar_t x0 + (1-abar_t) / K).
std::vector<double> categorical_jump(std::span<const double> onehot_x0, int t,
                                     const NoiseSchedule& schedule, Rng& rng);

/// Coordinate structure of the encoded space: which coordinates diffuse with
/// Gaussian noise and which belong to one-hot blocks diffusing multinomially.
struct BlockLayout {
    struct Block {
        std::size_t offset;
        std::size_t width;
    };
    std::size_t width = 0;
    std::vector<std::size_t> gaussian;  // coordinate indices
    std::vector<Block> blocks;          // nominal + label one-hot ranges

    static BlockLayout from_codec(const ColumnCodec& codec);
};

/// Fully-connected denoiser: input is the encoded vector plus a sinusoidal
/// timestep embedding; output has the encoded width. Gaussian coordinates are
/// read as predicted noise, one-hot block coordinates as category logits.
class Denoiser {
  public:
    struct Layer {
        std::size_t in = 0, out = 0;
        std::vector<double> w;  // row-major, out x in
        std::vector<double> b;
    };

    Denoiser() = default;
    /// He-style random init; `zero_init` builds an all-zero network instead.
    Denoiser(std::size_t data_width, std::size_t embed_width,
             const std::vector<std::size_t>& hidden, std::uint64_t seed,
             bool zero_init = false);

    std::size_t data_width() const { return data_width_; }
    std::size_t embed_width() const { return embed_width_; }
    std::vector<Layer>& layers() { return layers_; }
    const std::vector<Layer>& layers() const { return layers_; }

    /// Deterministic forward pass of one encoded vector at timestep t.
    std::vector<double> apply(std::span<const double> x, int t) const;

  private:
    friend struct DenoiserGradients;
    std::size_t data_width_ = 0;
    std::size_t embed_width_ = 0;
    std::vector<Layer> layers_;
};

std::vector<double> timestep_embedding(int t, std::size_t width);

/// Per-layer gradient buffers shaped like the network.
struct DenoiserGradients {
    std::vector<Denoiser::Layer> layers;

    explicit DenoiserGradients(const Denoiser& net);
    void zero();
};

/// A training minibatch already pushed through the forward process.
struct DiffusionBatch {
    std::vector<std::vector<double>> x_t;
    std::vector<int> t;
    /// Noise targets for gaussian coordinates, aligned with layout.gaussian.
    std::vector<std::vector<double>> eps;
    /// True category per one-hot block, aligned with layout.blocks.
    std::vector<std::vector<std::size_t>> category;
};

/// Training loss on one batch: mean squared error of the predicted noise over
/// gaussian coordinates plus mean cross-entropy of block logits against the
/// clean categories.
double diffusion_loss(const Denoiser& net, const BlockLayout& layout,
                      const DiffusionBatch& batch);

/// Loss plus analytic gradients (accumulated into `grads`, which is zeroed).
double diffusion_loss_grad(const Denoiser& net, const BlockLayout& layout,
                           const DiffusionBatch& batch, DenoiserGradients& grads);

struct DiffusionConfig {
    int steps = 100;
    double beta_start = 1e-4;
    double beta_end = 0.02;
    std::vector<std::size_t> hidden;  // empty -> two layers of max(64, 2W)
    int epochs = 1000;
    std::size_t batch_size = 64;
    double learning_rate = 1e-3;
    double momentum = 0.9;
    std::size_t embed_width = 16;

    void validate() const;
};

struct DiffusionModel {
    NoiseSchedule schedule;
    Denoiser net;
    BlockLayout layout;
    std::uint64_t codec_hash = 0;
    std::vector<double> loss_trace;  // one entry per epoch

    bool trained() const { return !loss_trace.empty(); }
};

/// Trains a denoiser on encoded rows with SGD + momentum. Deterministic given
/// the seed. Throws on fewer than two rows, zero width, or a non-finite loss.
DiffusionModel train_diffusion(const std::vector<std::vector<double>>& encoded_rows,
                               const BlockLayout& layout, const DiffusionConfig& config,
                               std::uint64_t seed, std::uint64_t codec_hash = 0);

struct GeneratedSample {
    /// Final sample: gaussian coordinates real-valued, blocks exactly one-hot.
    std::vector<double> values;
    /// Same vector but with each block holding the posterior category
    /// probabilities used for the final draw (a soft score per category).
    std::vector<double> scores;
};

/// Reverse-process sampling. Gaussian coordinates start from N(0, I); blocks
/// start from the uniform categorical. Instance i draws from a seed derived
/// as derive_seed(seed, i), so samples are independent of batching order.
std::vector<GeneratedSample> sample_diffusion(const DiffusionModel& model, std::size_t n,
                                              std::uint64_t seed);

/// Binary model container (versioned, little-endian doubles). Loading checks
/// the stored codec hash against `expected_codec_hash` unless that is 0.
void save_model(const DiffusionModel& model, const std::string& path);
DiffusionModel load_model(const std::string& path, std::uint64_t expected_codec_hash = 0);

}  // namespace mld
