#include "mld/diffusion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "mld/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "model serialization assumes a little-endian host");

namespace mld {

namespace {

constexpr std::uint64_t kInitStream = 0x696e6974;   // "init"
constexpr std::uint64_t kTrainStream = 0x7472696e;  // "trin"

double silu(double x) { return x / (1.0 + std::exp(-x)); }

double silu_grad(double x) {
    const double s = 1.0 / (1.0 + std::exp(-x));
    return s * (1.0 + x * (1.0 - s));
}

std::size_t draw_category(std::span<const double> probs, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        acc += probs[k];
        if (u < acc) return k;
    }
    return probs.size() - 1;
}

void check_onehot(std::span<const double> block) {
    std::size_t ones = 0;
    for (double v : block) {
        if (v == 1.0) {
            ++ones;
        } else if (v != 0.0) {
            throw Error("block is not one-hot");
        }
    }
    if (ones != 1) throw Error("block is not one-hot");
}

void check_t(int t, const NoiseSchedule& schedule) {
    if (t < 1 || t > schedule.steps) {
        throw Error("timestep " + std::to_string(t) + " outside [1, " +
                    std::to_string(schedule.steps) + "]");
    }
}

}  // namespace

NoiseSchedule make_schedule(int steps, double beta_start, double beta_end) {
    if (steps < 1) throw ConfigError("schedule needs at least one step");
    if (!(beta_start > 0.0) || !(beta_end < 1.0) || beta_start > beta_end) {
        throw ConfigError("betas must satisfy 0 < beta_start <= beta_end < 1");
    }
    NoiseSchedule s;
    s.steps = steps;
    s.beta.resize(static_cast<std::size_t>(steps));
    s.alpha.resize(s.beta.size());
    s.alpha_bar.resize(s.beta.size());
    double product = 1.0;
    for (int t = 1; t <= steps; ++t) {
        const double frac = steps == 1 ? 0.0 : double(t - 1) / double(steps - 1);
        const double beta = beta_start + frac * (beta_end - beta_start);
        const auto i = static_cast<std::size_t>(t - 1);
        s.beta[i] = beta;
        s.alpha[i] = 1.0 - beta;
        product *= s.alpha[i];
        s.alpha_bar[i] = product;
    }
    return s;
}

std::vector<double> forward_step(const std::vector<double>& x_prev, int t,
                                 const NoiseSchedule& schedule, Rng& rng) {
    check_t(t, schedule);
    const double beta = schedule.beta_at(t);
    const double keep = std::sqrt(1.0 - beta);
    const double spread = std::sqrt(beta);
    std::vector<double> out(x_prev.size());
    for (std::size_t i = 0; i < x_prev.size(); ++i) {
        out[i] = keep * x_prev[i] + spread * rng.normal();
    }
    return out;
}

std::pair<std::vector<double>, std::vector<double>> forward_jump(
    const std::vector<double>& x0, int t, const NoiseSchedule& schedule, Rng& rng) {
    check_t(t, schedule);
    const double abar = schedule.alpha_bar_at(t);
    const double keep = std::sqrt(abar);
    const double spread = std::sqrt(1.0 - abar);
    std::vector<double> x_t(x0.size());
    std::vector<double> eps(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) {
        eps[i] = rng.normal();
        x_t[i] = keep * x0[i] + spread * eps[i];
    }
    return {std::move(x_t), std::move(eps)};
}

std::vector<double> categorical_forward(std::span<const double> onehot, int t,
                                        const NoiseSchedule& schedule, Rng& rng) {
    check_t(t, schedule);
    check_onehot(onehot);
    const double beta = schedule.beta_at(t);
    const double k = static_cast<double>(onehot.size());
    std::vector<double> probs(onehot.size());
    for (std::size_t i = 0; i < onehot.size(); ++i) {
        probs[i] = (1.0 - beta) * onehot[i] + beta / k;
    }
    std::vector<double> out(onehot.size(), 0.0);
    out[draw_category(probs, rng)] = 1.0;
    return out;
}

std::vector<double> categorical_jump(std::span<const double> onehot_x0, int t,
                                     const NoiseSchedule& schedule, Rng& rng) {
    check_t(t, schedule);
    check_onehot(onehot_x0);
    const double abar = schedule.alpha_bar_at(t);
    const double k = static_cast<double>(onehot_x0.size());
    std::vector<double> probs(onehot_x0.size());
    for (std::size_t i = 0; i < onehot_x0.size(); ++i) {
        probs[i] = abar * onehot_x0[i] + (1.0 - abar) / k;
    }
    std::vector<double> out(onehot_x0.size(), 0.0);
    out[draw_category(probs, rng)] = 1.0;
    return out;
}

BlockLayout BlockLayout::from_codec(const ColumnCodec& codec) {
    BlockLayout layout;
    layout.width = codec.width();
    for (const auto& entry : codec.layout()) {
        if (entry.kind == CodecEntry::Kind::Numeric) {
            layout.gaussian.push_back(entry.offset);
        } else {
            layout.blocks.push_back({entry.offset, entry.width});
        }
    }
    return layout;
}

// ---------------------------------------------------------------------------
// Denoiser network
// ---------------------------------------------------------------------------

std::vector<double> timestep_embedding(int t, std::size_t width) {
    std::vector<double> emb(width);
    const std::size_t half = width / 2;
    for (std::size_t i = 0; i < half; ++i) {
        const double freq = std::exp(-std::log(10000.0) * double(i) / double(half));
        emb[2 * i] = std::sin(t * freq);
        emb[2 * i + 1] = std::cos(t * freq);
    }
    if (width % 2) emb[width - 1] = 0.0;
    return emb;
}

Denoiser::Denoiser(std::size_t data_width, std::size_t embed_width,
                   const std::vector<std::size_t>& hidden, std::uint64_t seed, bool zero_init)
    : data_width_(data_width), embed_width_(embed_width) {
    if (data_width == 0) throw ConfigError("denoiser needs a positive data width");
    std::vector<std::size_t> sizes;
    sizes.push_back(data_width + embed_width);
    for (auto h : hidden) {
        if (h == 0) throw ConfigError("hidden layer width must be positive");
        sizes.push_back(h);
    }
    sizes.push_back(data_width);

    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        Layer layer;
        layer.in = sizes[l];
        layer.out = sizes[l + 1];
        layer.w.assign(layer.in * layer.out, 0.0);
        layer.b.assign(layer.out, 0.0);
        if (!zero_init) {
            const double limit = std::sqrt(6.0 / double(layer.in));
            for (auto& w : layer.w) w = (2.0 * rng.uniform() - 1.0) * limit;
        }
        layers_.push_back(std::move(layer));
    }
}

std::vector<double> Denoiser::apply(std::span<const double> x, int t) const {
    if (x.size() != data_width_) {
        throw Error("denoiser input width " + std::to_string(x.size()) +
                    " does not match network width " + std::to_string(data_width_));
    }
    std::vector<double> act(x.begin(), x.end());
    const auto emb = timestep_embedding(t, embed_width_);
    act.insert(act.end(), emb.begin(), emb.end());

    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        std::vector<double> next(layer.out);
        for (std::size_t o = 0; o < layer.out; ++o) {
            double acc = layer.b[o];
            const double* row = layer.w.data() + o * layer.in;
            for (std::size_t i = 0; i < layer.in; ++i) acc += row[i] * act[i];
            next[o] = l + 1 < layers_.size() ? silu(acc) : acc;
        }
        act = std::move(next);
    }
    return act;
}

DenoiserGradients::DenoiserGradients(const Denoiser& net) {
    for (const auto& layer : net.layers()) {
        Denoiser::Layer g;
        g.in = layer.in;
        g.out = layer.out;
        g.w.assign(layer.w.size(), 0.0);
        g.b.assign(layer.b.size(), 0.0);
        layers.push_back(std::move(g));
    }
}

void DenoiserGradients::zero() {
    for (auto& layer : layers) {
        std::fill(layer.w.begin(), layer.w.end(), 0.0);
        std::fill(layer.b.begin(), layer.b.end(), 0.0);
    }
}

namespace {

// Forward pass retaining pre-activations for backprop.
struct ForwardTrace {
    std::vector<std::vector<double>> inputs;  // activation entering each layer
    std::vector<std::vector<double>> pre;     // pre-activation of each layer
    std::vector<double> out;
};

ForwardTrace forward_traced(const Denoiser& net, std::span<const double> x, int t) {
    ForwardTrace trace;
    std::vector<double> act(x.begin(), x.end());
    const auto emb = timestep_embedding(t, net.embed_width());
    act.insert(act.end(), emb.begin(), emb.end());

    const auto& layers = net.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        trace.inputs.push_back(act);
        std::vector<double> pre(layer.out);
        for (std::size_t o = 0; o < layer.out; ++o) {
            double acc = layer.b[o];
            const double* row = layer.w.data() + o * layer.in;
            for (std::size_t i = 0; i < layer.in; ++i) acc += row[i] * act[i];
            pre[o] = acc;
        }
        trace.pre.push_back(pre);
        if (l + 1 < layers.size()) {
            act.resize(layer.out);
            for (std::size_t o = 0; o < layer.out; ++o) act[o] = silu(pre[o]);
        } else {
            act = pre;
        }
    }
    trace.out = act;
    return trace;
}

void backward_traced(const Denoiser& net, const ForwardTrace& trace,
                     std::vector<double> d_out, DenoiserGradients& grads) {
    const auto& layers = net.layers();
    for (std::size_t l = layers.size(); l-- > 0;) {
        const auto& layer = layers[l];
        // d_out currently holds dL/d(post-activation of layer l); convert to
        // dL/d(pre-activation).
        if (l + 1 < layers.size()) {
            for (std::size_t o = 0; o < layer.out; ++o) {
                d_out[o] *= silu_grad(trace.pre[l][o]);
            }
        }
        const auto& input = trace.inputs[l];
        auto& g = grads.layers[l];
        for (std::size_t o = 0; o < layer.out; ++o) {
            g.b[o] += d_out[o];
            double* grow = g.w.data() + o * layer.in;
            for (std::size_t i = 0; i < layer.in; ++i) grow[i] += d_out[o] * input[i];
        }
        if (l == 0) break;
        std::vector<double> d_in(layer.in, 0.0);
        for (std::size_t o = 0; o < layer.out; ++o) {
            const double* row = layer.w.data() + o * layer.in;
            for (std::size_t i = 0; i < layer.in; ++i) d_in[i] += row[i] * d_out[o];
        }
        d_in.resize(layers[l - 1].out);  // drop nothing; widths already match
        d_out = std::move(d_in);
    }
}

struct LossTerms {
    double mse_sum = 0.0;
    double ce_sum = 0.0;
    std::size_t gauss_terms = 0;
    std::size_t block_terms = 0;

    double total() const {
        double loss = 0.0;
        if (gauss_terms > 0) loss += mse_sum / double(gauss_terms);
        if (block_terms > 0) loss += ce_sum / double(block_terms);
        return loss;
    }
};

}  // namespace

double diffusion_loss(const Denoiser& net, const BlockLayout& layout,
                      const DiffusionBatch& batch) {
    LossTerms terms;
    for (std::size_t row = 0; row < batch.x_t.size(); ++row) {
        const auto out = net.apply(batch.x_t[row], batch.t[row]);
        for (std::size_t gi = 0; gi < layout.gaussian.size(); ++gi) {
            const double diff = out[layout.gaussian[gi]] - batch.eps[row][gi];
            terms.mse_sum += diff * diff;
            ++terms.gauss_terms;
        }
        for (std::size_t bi = 0; bi < layout.blocks.size(); ++bi) {
            const auto& block = layout.blocks[bi];
            std::vector<double> probs(out.begin() + block.offset,
                                      out.begin() + block.offset + block.width);
            double mx = *std::max_element(probs.begin(), probs.end());
            double sum = 0.0;
            for (auto& p : probs) sum += std::exp(p - mx);
            const double log_p =
                probs[batch.category[row][bi]] - mx - std::log(sum);
            terms.ce_sum -= log_p;
            ++terms.block_terms;
        }
    }
    return terms.total();
}

double diffusion_loss_grad(const Denoiser& net, const BlockLayout& layout,
                           const DiffusionBatch& batch, DenoiserGradients& grads) {
    grads.zero();
    LossTerms terms;
    const std::size_t rows = batch.x_t.size();
    const double gauss_norm =
        layout.gaussian.empty() ? 0.0 : 1.0 / double(rows * layout.gaussian.size());
    const double block_norm =
        layout.blocks.empty() ? 0.0 : 1.0 / double(rows * layout.blocks.size());

    for (std::size_t row = 0; row < rows; ++row) {
        const auto trace = forward_traced(net, batch.x_t[row], batch.t[row]);
        std::vector<double> d_out(trace.out.size(), 0.0);

        for (std::size_t gi = 0; gi < layout.gaussian.size(); ++gi) {
            const auto coord = layout.gaussian[gi];
            const double diff = trace.out[coord] - batch.eps[row][gi];
            terms.mse_sum += diff * diff;
            ++terms.gauss_terms;
            d_out[coord] = 2.0 * diff * gauss_norm;
        }
        for (std::size_t bi = 0; bi < layout.blocks.size(); ++bi) {
            const auto& block = layout.blocks[bi];
            std::vector<double> soft(trace.out.begin() + block.offset,
                                     trace.out.begin() + block.offset + block.width);
            double mx = *std::max_element(soft.begin(), soft.end());
            double sum = 0.0;
            for (auto& p : soft) {
                p = std::exp(p - mx);
                sum += p;
            }
            for (auto& p : soft) p /= sum;
            const std::size_t target = batch.category[row][bi];
            terms.ce_sum -= std::log(std::max(soft[target], 1e-300));
            ++terms.block_terms;
            for (std::size_t k = 0; k < block.width; ++k) {
                d_out[block.offset + k] =
                    (soft[k] - (k == target ? 1.0 : 0.0)) * block_norm;
            }
        }
        backward_traced(net, trace, std::move(d_out), grads);
    }
    return terms.total();
}

void DiffusionConfig::validate() const {
    if (steps < 1) throw ConfigError("diffusion.steps must be at least 1");
    if (!(beta_start > 0.0) || !(beta_end < 1.0) || beta_start > beta_end) {
        throw ConfigError("diffusion betas must satisfy 0 < beta_start <= beta_end < 1");
    }
    if (epochs < 1) throw ConfigError("diffusion.epochs must be at least 1");
    if (batch_size < 1) throw ConfigError("diffusion.batch must be at least 1");
    if (!(learning_rate > 0.0)) throw ConfigError("diffusion.lr must be positive");
    if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("diffusion.momentum must lie in [0, 1)");
    if (embed_width == 0) throw ConfigError("diffusion.embed_width must be positive");
}

DiffusionModel train_diffusion(const std::vector<std::vector<double>>& encoded_rows,
                               const BlockLayout& layout, const DiffusionConfig& config,
                               std::uint64_t seed, std::uint64_t codec_hash) {
    config.validate();
    if (encoded_rows.size() < 2) throw Error("training needs at least 2 rows");
    if (layout.width == 0) throw Error("training needs a positive encoded width");
    for (const auto& row : encoded_rows) {
        if (row.size() != layout.width) throw Error("encoded row width does not match layout");
    }

    DiffusionModel model;
    model.schedule = make_schedule(config.steps, config.beta_start, config.beta_end);
    model.layout = layout;
    model.codec_hash = codec_hash;

    std::vector<std::size_t> hidden = config.hidden;
    if (hidden.empty()) {
        const std::size_t h = std::max<std::size_t>(64, 2 * layout.width);
        hidden = {h, h};
    }
    model.net = Denoiser(layout.width, config.embed_width, hidden,
                         derive_seed(seed, kInitStream));

    Rng rng(derive_seed(seed, kTrainStream));
    DenoiserGradients grads(model.net);
    DenoiserGradients velocity(model.net);

    std::vector<std::size_t> order(encoded_rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng.below(i)]);
        }
        double epoch_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            DiffusionBatch batch;
            for (std::size_t pos = start; pos < stop; ++pos) {
                const auto& x0 = encoded_rows[order[pos]];
                const int t = 1 + static_cast<int>(rng.below(std::uint64_t(config.steps)));
                const double abar = model.schedule.alpha_bar_at(t);
                const double keep = std::sqrt(abar);
                const double spread = std::sqrt(1.0 - abar);

                std::vector<double> x_t(x0);
                std::vector<double> eps(layout.gaussian.size());
                for (std::size_t gi = 0; gi < layout.gaussian.size(); ++gi) {
                    const auto coord = layout.gaussian[gi];
                    eps[gi] = rng.normal();
                    x_t[coord] = keep * x0[coord] + spread * eps[gi];
                }
                std::vector<std::size_t> cats(layout.blocks.size());
                for (std::size_t bi = 0; bi < layout.blocks.size(); ++bi) {
                    const auto& block = layout.blocks[bi];
                    std::size_t clean = 0;
                    for (std::size_t k = 1; k < block.width; ++k) {
                        if (x0[block.offset + k] > x0[block.offset + clean]) clean = k;
                    }
                    cats[bi] = clean;
                    const double k = double(block.width);
                    std::vector<double> probs(block.width);
                    for (std::size_t j = 0; j < block.width; ++j) {
                        probs[j] = abar * x0[block.offset + j] + (1.0 - abar) / k;
                    }
                    const std::size_t noised = draw_category(probs, rng);
                    for (std::size_t j = 0; j < block.width; ++j) {
                        x_t[block.offset + j] = j == noised ? 1.0 : 0.0;
                    }
                }
                batch.x_t.push_back(std::move(x_t));
                batch.t.push_back(t);
                batch.eps.push_back(std::move(eps));
                batch.category.push_back(std::move(cats));
            }

            const double loss = diffusion_loss_grad(model.net, layout, batch, grads);
            if (!std::isfinite(loss)) {
                throw Error("training diverged at epoch " + std::to_string(epoch) +
                            ": loss is not finite (lower the learning rate)");
            }
            epoch_loss += loss * double(stop - start);
            seen += stop - start;

            for (std::size_t l = 0; l < model.net.layers().size(); ++l) {
                auto& layer = model.net.layers()[l];
                auto& v = velocity.layers[l];
                const auto& g = grads.layers[l];
                for (std::size_t i = 0; i < layer.w.size(); ++i) {
                    v.w[i] = config.momentum * v.w[i] - config.learning_rate * g.w[i];
                    layer.w[i] += v.w[i];
                }
                for (std::size_t i = 0; i < layer.b.size(); ++i) {
                    v.b[i] = config.momentum * v.b[i] - config.learning_rate * g.b[i];
                    layer.b[i] += v.b[i];
                }
            }
        }
        model.loss_trace.push_back(epoch_loss / double(seen));
    }
    return model;
}

std::vector<GeneratedSample> sample_diffusion(const DiffusionModel& model, std::size_t n,
                                              std::uint64_t seed) {
    if (!model.trained()) throw Error("cannot sample from an untrained model");
    const auto& layout = model.layout;
    const auto& sched = model.schedule;

    std::vector<GeneratedSample> out;
    out.reserve(n);
    for (std::size_t inst = 0; inst < n; ++inst) {
        Rng rng(derive_seed(seed, inst));
        std::vector<double> x(layout.width, 0.0);
        for (auto coord : layout.gaussian) x[coord] = rng.normal();
        for (const auto& block : layout.blocks) {
            x[block.offset + rng.below(block.width)] = 1.0;
        }

        std::vector<double> scores(layout.width, 0.0);
        for (int t = sched.steps; t >= 1; --t) {
            const auto pred = model.net.apply(x, t);
            const double beta = sched.beta_at(t);
            const double alpha = sched.alpha_at(t);
            const double abar = sched.alpha_bar_at(t);
            const double abar_prev = sched.alpha_bar_at(t - 1);

            const double coef = beta / std::sqrt(1.0 - abar);
            const double inv_sqrt_alpha = 1.0 / std::sqrt(alpha);
            const double sigma = std::sqrt(beta);
            for (auto coord : layout.gaussian) {
                double mean = inv_sqrt_alpha * (x[coord] - coef * pred[coord]);
                x[coord] = t > 1 ? mean + sigma * rng.normal() : mean;
            }

            for (const auto& block : layout.blocks) {
                std::vector<double> x0_hat(pred.begin() + block.offset,
                                           pred.begin() + block.offset + block.width);
                {
                    double mx = *std::max_element(x0_hat.begin(), x0_hat.end());
                    double sum = 0.0;
                    for (auto& p : x0_hat) {
                        p = std::exp(p - mx);
                        sum += p;
                    }
                    for (auto& p : x0_hat) p /= sum;
                }
                const double k = double(block.width);
                std::vector<double> theta(block.width);
                double norm = 0.0;
                for (std::size_t j = 0; j < block.width; ++j) {
                    const double from_step = alpha * x[block.offset + j] + (1.0 - alpha) / k;
                    const double from_clean = abar_prev * x0_hat[j] + (1.0 - abar_prev) / k;
                    theta[j] = from_step * from_clean;
                    norm += theta[j];
                }
                for (auto& p : theta) p /= norm;
                const std::size_t cat = draw_category(theta, rng);
                for (std::size_t j = 0; j < block.width; ++j) {
                    x[block.offset + j] = j == cat ? 1.0 : 0.0;
                }
                if (t == 1) {
                    for (std::size_t j = 0; j < block.width; ++j) {
                        scores[block.offset + j] = theta[j];
                    }
                }
            }
        }
        for (auto coord : layout.gaussian) scores[coord] = x[coord];
        out.push_back({std::move(x), std::move(scores)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'M', 'L', 'D', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void put_vec(std::ofstream& out, const std::vector<T>& v) {
    put(out, std::uint64_t(v.size()));
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
T get(std::ifstream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw Error("truncated model file");
    return value;
}

template <typename T>
std::vector<T> get_vec(std::ifstream& in) {
    const auto size = get<std::uint64_t>(in);
    std::vector<T> v(size);
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(size * sizeof(T)));
    if (!in) throw Error("truncated model file");
    return v;
}

}  // namespace

void save_model(const DiffusionModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write model file '" + path + "'");
    out.write(kMagic, 4);
    put(out, kVersion);
    put(out, model.codec_hash);
    put(out, std::int32_t(model.schedule.steps));
    put_vec(out, model.schedule.beta);
    put(out, std::uint64_t(model.net.data_width()));
    put(out, std::uint64_t(model.net.embed_width()));
    put(out, std::uint64_t(model.net.layers().size()));
    for (const auto& layer : model.net.layers()) {
        put(out, std::uint64_t(layer.in));
        put(out, std::uint64_t(layer.out));
        put_vec(out, layer.w);
        put_vec(out, layer.b);
    }
    put_vec(out, model.layout.gaussian);
    put(out, std::uint64_t(model.layout.blocks.size()));
    for (const auto& block : model.layout.blocks) {
        put(out, std::uint64_t(block.offset));
        put(out, std::uint64_t(block.width));
    }
    put_vec(out, model.loss_trace);
    if (!out) throw Error("failed writing model file '" + path + "'");
}

DiffusionModel load_model(const std::string& path, std::uint64_t expected_codec_hash) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file '" + path + "'");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw Error("'" + path + "' is not a model file");
    }
    if (get<std::uint32_t>(in) != kVersion) throw Error("unsupported model version");

    DiffusionModel model;
    model.codec_hash = get<std::uint64_t>(in);
    if (expected_codec_hash != 0 && model.codec_hash != expected_codec_hash) {
        throw Error("model was trained against a different codec (hash mismatch)");
    }
    const auto steps = get<std::int32_t>(in);
    model.schedule.steps = steps;
    model.schedule.beta = get_vec<double>(in);
    if (model.schedule.beta.size() != std::size_t(steps)) throw Error("corrupt schedule");
    model.schedule.alpha.resize(model.schedule.beta.size());
    model.schedule.alpha_bar.resize(model.schedule.beta.size());
    double product = 1.0;
    for (std::size_t i = 0; i < model.schedule.beta.size(); ++i) {
        model.schedule.alpha[i] = 1.0 - model.schedule.beta[i];
        product *= model.schedule.alpha[i];
        model.schedule.alpha_bar[i] = product;
    }

    const auto data_width = get<std::uint64_t>(in);
    const auto embed_width = get<std::uint64_t>(in);
    const auto n_layers = get<std::uint64_t>(in);
    std::vector<std::size_t> hidden;
    std::vector<Denoiser::Layer> layers;
    for (std::uint64_t l = 0; l < n_layers; ++l) {
        Denoiser::Layer layer;
        layer.in = get<std::uint64_t>(in);
        layer.out = get<std::uint64_t>(in);
        layer.w = get_vec<double>(in);
        layer.b = get_vec<double>(in);
        if (layer.w.size() != layer.in * layer.out || layer.b.size() != layer.out) {
            throw Error("corrupt layer shapes");
        }
        if (l + 1 < n_layers) hidden.push_back(layer.out);
        layers.push_back(std::move(layer));
    }
    model.net = Denoiser(data_width, embed_width, hidden, 0, true);
    model.net.layers() = std::move(layers);

    model.layout.width = data_width;
    model.layout.gaussian = get_vec<std::size_t>(in);
    const auto n_blocks = get<std::uint64_t>(in);
    for (std::uint64_t b = 0; b < n_blocks; ++b) {
        BlockLayout::Block block;
        block.offset = get<std::uint64_t>(in);
        block.width = get<std::uint64_t>(in);
        model.layout.blocks.push_back(block);
    }
    model.loss_trace = get_vec<double>(in);
    return model;
}

}  // namespace mld
