// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "builders.hpp"
#include "mld/arff.hpp"
#include "mld/cli.hpp"
#include "mld/codec.hpp"
#include "mld/dataset.hpp"
#include "mld/diffusion.hpp"
#include "mld/eval.hpp"
#include "mld/metrics.hpp"
#include "mld/mlknn.hpp"
#include "mld/resamplers.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace mld;

namespace {

struct Checker {
    std::vector<std::string> failures;
    std::string note;

    void require(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    bool passed() const { return failures.empty(); }
};

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch()).count();
}

struct CliRun {
    int exit_code = -1;
    std::string output;
};

CliRun run_cli(const std::string& args) {
    CliRun result;
    const std::string command = std::string(MLD_CLI_PATH) + " " + args + " 2>&1";
    std::array<char, 4096> buffer{};
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) return result;
    while (std::fgets(buffer.data(), buffer.size(), pipe) != nullptr) {
        result.output += buffer.data();
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

DiffusionConfig acceptance_diffusion() {
    DiffusionConfig cfg;
    cfg.steps = 40;
    cfg.beta_start = 1e-3;
    cfg.beta_end = 0.3;
    cfg.epochs = 200;
    cfg.batch_size = 64;
    cfg.hidden = {64};
    cfg.learning_rate = 2e-3;
    return cfg;
}

// Longer fit for wall-clock comparisons, so scheduler noise stays well under
// the tolerances being asserted.
DiffusionConfig timing_diffusion() {
    auto cfg = acceptance_diffusion();
    cfg.epochs = 1500;
    return cfg;
}

// Emotions-sized synthetic stand-in: 593 instances, 72 numeric attributes,
// 6 labels on a frequency ladder.
MultilabelDataset emotions_scale_dataset(std::uint64_t seed) {
    const std::size_t n = 593, nf = 72;
    const std::vector<double> fractions = {0.45, 0.30, 0.20, 0.12, 0.08, 0.05};
    Rng rng(seed);
    std::vector<std::vector<std::uint8_t>> sets(n, std::vector<std::uint8_t>(6, 0));
    std::vector<std::size_t> order(n);
    for (std::size_t l = 0; l < fractions.size(); ++l) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        const auto count = static_cast<std::size_t>(fractions[l] * double(n));
        for (std::size_t i = 0; i < count; ++i) sets[order[i]][l] = 1;
    }
    std::vector<std::vector<double>> rows(n, std::vector<double>(nf));
    for (auto& row : rows) {
        for (auto& v : row) v = rng.normal();
    }
    std::vector<FeatureColumn> columns;
    for (std::size_t c = 0; c < nf; ++c) columns.push_back({"a" + std::to_string(c), {}});
    return MultilabelDataset(std::move(columns),
                             {"L0", "L1", "L2", "L3", "L4", "L5"}, std::move(rows),
                             std::move(sets));
}

// Variant of the imbalanced builder whose three rarest labels keep fixed
// absolute counts, so the minority training subset stays comparable across
// dataset sizes.
MultilabelDataset fixed_tail_dataset(std::size_t n, std::uint64_t seed) {
    const std::vector<double> fractions = {0.60, 0.40, 0.20, 0.10, 0.06};
    const std::vector<std::size_t> tail_counts = {20, 15, 10};
    Rng rng(seed);
    const std::size_t nl = fractions.size() + tail_counts.size();
    std::vector<std::vector<std::uint8_t>> sets(n, std::vector<std::uint8_t>(nl, 0));
    std::vector<std::size_t> order(n);
    auto scatter = [&](std::size_t label, std::size_t count) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        for (std::size_t i = 0; i < count && i < n; ++i) sets[order[i]][label] = 1;
    };
    for (std::size_t l = 0; l < fractions.size(); ++l) {
        scatter(l, static_cast<std::size_t>(fractions[l] * double(n)));
    }
    for (std::size_t t = 0; t < tail_counts.size(); ++t) {
        scatter(fractions.size() + t, tail_counts[t]);
    }
    const std::size_t nf = 4;
    std::vector<std::vector<double>> rows(n, std::vector<double>(nf));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < nf; ++c) {
            double v = 0.3 * rng.normal();
            for (std::size_t l = 0; l < nl; ++l) v += sets[i][l] ? 0.4 * double(l) : 0.0;
            rows[i][c] = v;
        }
    }
    std::vector<FeatureColumn> columns;
    for (std::size_t c = 0; c < nf; ++c) columns.push_back({"f" + std::to_string(c), {}});
    std::vector<std::string> labels;
    for (std::size_t l = 0; l < nl; ++l) labels.push_back("L" + std::to_string(l));
    return MultilabelDataset(std::move(columns), std::move(labels), std::move(rows),
                             std::move(sets));
}

// ---------------------------------------------------------------------------
// criterion bodies
// ---------------------------------------------------------------------------

void metric_oracle_suite(Checker& c) {
    const auto td4 = testing_data::td4();
    const auto profile = compute_profile(td4);
    c.require(std::fabs(profile.card - 1.25) < 1e-12, "TD4 Card != 1.25");
    c.require(std::fabs(profile.mean_ir - 7.0 / 3.0) < 1e-12, "TD4 MeanIR != 7/3");
    c.require(std::fabs(profile.scumble - (1.0 - std::sqrt(3.0) / 2.0) / 4.0) < 1e-12,
              "TD4 SCUMBLE mismatch");
    c.require(profile.minority_labels == std::vector<std::size_t>{1, 2},
              "TD4 minority set != {B, C}");

    Rng rng(20240817);
    for (int trial = 0; trial < 100; ++trial) {
        const auto ds = testing_data::random_dataset(rng, 20, 6);
        const auto want = oracle::evaluate_metrics(ds.labelsets());
        const auto got = compute_profile(ds);
        auto close = [](double a, double b) {
            return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
        };
        c.require(close(got.card, want.card), "random dataset: Card disagrees");
        c.require(close(got.dens, want.dens), "random dataset: Dens disagrees");
        c.require(close(got.mean_ir, want.mean_ir), "random dataset: MeanIR disagrees");
        c.require(close(got.scumble, want.scumble), "random dataset: SCUMBLE disagrees");
        c.require(got.minority_labels == want.minority, "random dataset: minority disagrees");
        for (std::size_t l = 0; l < ds.label_count(); ++l) {
            if (want.irlbl[l] < 0.0) {
                c.require(std::isnan(got.irlbl[l]), "zero-count IRlbl not excluded");
            } else {
                c.require(close(got.irlbl[l], want.irlbl[l]), "random dataset: IRlbl disagrees");
            }
        }
    }
}

void criterion1(Checker& c) {
    const char* env = std::getenv("MLD_DATA_DIR");
    std::vector<fs::path> roots;
    if (env) roots.emplace_back(env);
    roots.emplace_back("data");
    roots.emplace_back("../data");

    struct Expected {
        const char* name;
        double card, dens, mean_ir, scumble;
        std::size_t instances, attributes, labels;
    };
    const Expected table1[] = {
        {"emotions", 1.8685, 0.3114, 1.4781, 0.0110, 593, 72, 6},
        {"scene", 1.0740, 0.1790, 1.2538, 0.0003, 2407, 294, 6},
    };

    fs::path root;
    for (const auto& candidate : roots) {
        if (fs::exists(candidate / "emotions.arff") && fs::exists(candidate / "scene.arff")) {
            root = candidate;
            break;
        }
    }
    if (root.empty()) {
        c.note = "Cometa datasets not present; the TD4 oracle suite substitutes";
        metric_oracle_suite(c);
        return;
    }

    for (const auto& want : table1) {
        const auto start = now_seconds();
        const auto ds = load_mulan((root / (std::string(want.name) + ".arff")).string(),
                                   (root / (std::string(want.name) + ".xml")).string());
        const auto profile = compute_profile(ds);
        const double elapsed = now_seconds() - start;
        auto close = [](double a, double b) { return std::fabs(a - b) <= 0.0005; };
        c.require(ds.size() == want.instances, std::string(want.name) + ": instance count");
        c.require(ds.feature_count() == want.attributes, std::string(want.name) + ": #attr");
        c.require(ds.label_count() == want.labels, std::string(want.name) + ": #labels");
        c.require(close(profile.card, want.card), std::string(want.name) + ": Card");
        c.require(close(profile.dens, want.dens), std::string(want.name) + ": Dens");
        c.require(close(profile.mean_ir, want.mean_ir), std::string(want.name) + ": MeanIR");
        c.require(close(profile.scumble, want.scumble), std::string(want.name) + ": SCUMBLE");
        c.require(elapsed < 5.0, std::string(want.name) + ": inspect exceeded 5 s");
    }
    c.note = "verified against the Cometa files in " + root.string();
}

void criterion3(Checker& c) {
    const auto sched = make_schedule(10, 0.02, 0.3);
    const std::vector<double> x0 = {-1.0, 0.5, 2.0};
    const int trials = 10000;
    for (int t : {1, 5, 10}) {
        Rng rj(300 + t), ri(400 + t);
        std::vector<double> mean_j(3, 0.0), var_j(3, 0.0), mean_i(3, 0.0), var_i(3, 0.0);
        std::vector<std::vector<double>> jumps, iters;
        for (int n = 0; n < trials; ++n) {
            jumps.push_back(forward_jump(x0, t, sched, rj).first);
            auto x = x0;
            for (int s = 1; s <= t; ++s) x = forward_step(x, s, sched, ri);
            iters.push_back(std::move(x));
        }
        for (int n = 0; n < trials; ++n) {
            for (std::size_t d = 0; d < 3; ++d) {
                mean_j[d] += jumps[std::size_t(n)][d];
                mean_i[d] += iters[std::size_t(n)][d];
            }
        }
        for (auto& v : mean_j) v /= trials;
        for (auto& v : mean_i) v /= trials;
        for (int n = 0; n < trials; ++n) {
            for (std::size_t d = 0; d < 3; ++d) {
                var_j[d] += std::pow(jumps[std::size_t(n)][d] - mean_j[d], 2);
                var_i[d] += std::pow(iters[std::size_t(n)][d] - mean_i[d], 2);
            }
        }
        for (auto& v : var_j) v /= trials;
        for (auto& v : var_i) v /= trials;
        for (std::size_t d = 0; d < 3; ++d) {
            c.require(std::fabs(mean_j[d] - mean_i[d]) < 0.05,
                      "gaussian mean mismatch at t=" + std::to_string(t));
            c.require(std::fabs(var_j[d] - var_i[d]) < 0.1,
                      "gaussian variance mismatch at t=" + std::to_string(t));
        }
    }

    // categorical closed form: K=3, alpha_bar_2 = 0.72
    const auto two = make_schedule(2, 0.1, 0.2);
    Rng rng(55);
    const std::vector<double> block = {1.0, 0.0, 0.0};
    std::array<int, 3> hits{};
    for (int n = 0; n < trials; ++n) {
        const auto draw = categorical_jump(block, 2, two, rng);
        for (std::size_t d = 0; d < 3; ++d) hits[d] += draw[d] == 1.0 ? 1 : 0;
    }
    const double keep = 0.72 + 0.28 / 3.0;
    c.require(std::fabs(double(hits[0]) / trials - keep) < 0.01, "categorical keep frequency");
    c.require(std::fabs(double(hits[1]) / trials - 0.28 / 3.0) < 0.01,
              "categorical mix frequency (cat 1)");
    c.require(std::fabs(double(hits[2]) / trials - 0.28 / 3.0) < 0.01,
              "categorical mix frequency (cat 2)");
}

void criterion4(Checker& c) {
    BlockLayout layout;
    layout.width = 7;
    layout.gaussian = {0, 1, 2, 3};
    layout.blocks = {{4, 3}};
    Denoiser net(7, 4, {5}, 20250808);

    Rng rng(17);
    DiffusionBatch batch;
    for (int row = 0; row < 4; ++row) {
        std::vector<double> x(7);
        for (auto& v : x) v = rng.normal();
        const auto cat = rng.below(3);
        for (std::size_t j = 0; j < 3; ++j) x[4 + j] = j == cat ? 1.0 : 0.0;
        batch.x_t.push_back(std::move(x));
        batch.t.push_back(1 + int(rng.below(9)));
        batch.eps.push_back({rng.normal(), rng.normal(), rng.normal(), rng.normal()});
        batch.category.push_back({rng.below(3)});
    }

    DenoiserGradients grads(net);
    diffusion_loss_grad(net, layout, batch, grads);

    std::size_t checked = 0;
    auto check_tensor = [&](std::vector<double>& params, const std::vector<double>& grad,
                            const char* tag) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double saved = params[i];
            const double h = 1e-5 * std::max(1.0, std::fabs(saved));
            params[i] = saved + h;
            const double up = diffusion_loss(net, layout, batch);
            params[i] = saved - h;
            const double down = diffusion_loss(net, layout, batch);
            params[i] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double scale = std::max({std::fabs(numeric), std::fabs(grad[i]), 1e-6});
            if (std::fabs(numeric - grad[i]) / scale >= 1e-4) {
                c.failures.push_back(std::string("gradient mismatch in ") + tag);
                return;
            }
            ++checked;
        }
    };
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
        check_tensor(net.layers()[l].w, grads.layers[l].w,
                     ("layer " + std::to_string(l) + " weights").c_str());
        check_tensor(net.layers()[l].b, grads.layers[l].b,
                     ("layer " + std::to_string(l) + " biases").c_str());
    }
    c.require(checked > 0, "no parameters were checked");
    c.note = std::to_string(checked) + " parameters within 1e-4";
}

void criterion5(Checker& c) {
    const double start = now_seconds();
    Rng data_rng(2718);
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<std::uint8_t>> sets;
    for (int i = 0; i < 200; ++i) {
        rows.push_back({3.0 + data_rng.normal()});
        sets.push_back({1, 0});
    }
    MultilabelDataset ds({{"x", {}}}, {"on", "off"}, std::move(rows), std::move(sets));
    const auto codec = ColumnCodec::fit(ds);

    DiffusionConfig cfg;
    cfg.steps = 50;
    cfg.beta_start = 1e-3;
    cfg.beta_end = 0.3;
    cfg.epochs = 1500;
    cfg.batch_size = 64;
    cfg.hidden = {64, 64};
    cfg.learning_rate = 2e-3;

    const auto model = train_diffusion(codec.encode_dataset(ds),
                                       BlockLayout::from_codec(codec), cfg, 1234, codec.hash());
    c.require(model.loss_trace[499] < 0.5 * model.loss_trace.front(),
              "loss after 500 epochs not below half the initial loss");

    double sum = 0.0, sumsq = 0.0;
    for (const auto& s : sample_diffusion(model, 1000, 99)) {
        const double v = codec.decode(s.values).first[0];
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / 1000.0;
    const double sd = std::sqrt(sumsq / 1000.0 - mean * mean);
    c.require(std::fabs(mean - 3.0) < 0.3, "sample mean outside 3 +/- 0.3");
    c.require(std::fabs(sd - 1.0) < 0.3, "sample std outside 1 +/- 0.3");

    const double elapsed = now_seconds() - start;
    c.require(elapsed < 60.0, "train+sample exceeded 60 s");
    char note[128];
    std::snprintf(note, sizeof(note), "mean %.3f, std %.3f, %.1f s", mean, sd, elapsed);
    c.note = note;
}

void criterion6(Checker& c) {
    const auto ds = testing_data::imbalanced_dataset(500, 42);
    const auto before = compute_profile(ds);
    c.require(before.mean_ir > 8.0 && before.mean_ir < 13.0,
              "engineered MeanIR not near 10");
    c.require(before.scumble > 0.0, "engineered SCUMBLE is zero");

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto [out, report] = mldm_resample(ds, 25.0, acceptance_diffusion(), seed);
        c.require(report.synthetic_count == 125, "synthetic count != round(0.25*500)");
        c.require(report.mean_ir_after < report.mean_ir_before,
                  "seed " + std::to_string(seed) + ": MeanIR did not improve");
        for (std::size_t i = ds.size(); i < out.size(); ++i) {
            bool carries = false;
            for (auto l : before.minority_labels) carries = carries || out.has_label(i, l);
            if (!carries) {
                c.failures.push_back("seed " + std::to_string(seed) +
                                     ": synthetic instance without a minority label");
                break;
            }
        }
    }
}

void criterion7(Checker& c) {
    const auto ds = testing_data::imbalanced_dataset(150, 31);

    {
        const auto [out, report] = lpros(ds, 25.0, 3);
        for (std::size_t i = ds.size(); i < out.size(); ++i) {
            bool found = false;
            for (std::size_t j = 0; j < ds.size() && !found; ++j) {
                found = out.row(i) == ds.row(j) && out.labelset(i) == ds.labelset(j);
            }
            c.require(found, "lpros clone is not byte-identical to a source row");
        }
        c.require(report.synthetic_count > 0, "lpros produced nothing");
    }
    {
        const auto [out, report] = mlros(ds, 25.0, 3);
        for (std::size_t i = ds.size(); i < out.size(); ++i) {
            bool found = false;
            for (std::size_t j = 0; j < ds.size() && !found; ++j) {
                found = out.row(i) == ds.row(j) && out.labelset(i) == ds.labelset(j);
            }
            c.require(found, "mlros clone is not byte-identical to a source row");
        }
        c.require(report.synthetic_count > 0, "mlros produced nothing");
    }
    {
        const auto ranges = ds.column_ranges();
        const auto [out, report] = mlsmote(ds, 3, 9);
        c.require(report.synthetic_count > 0, "mlsmote produced nothing");
        for (std::size_t i = ds.size(); i < out.size(); ++i) {
            for (std::size_t col = 0; col < ds.feature_count(); ++col) {
                if (!ds.columns()[col].numeric()) continue;
                if (out.value(i, col) < ranges[col].first - 1e-12 ||
                    out.value(i, col) > ranges[col].second + 1e-12) {
                    c.failures.push_back("mlsmote numeric feature escaped the data range");
                }
            }
        }
    }
    {
        // ranking rule against the counting oracle, on the engineered cluster
        std::vector<std::vector<double>> rows;
        std::vector<std::vector<std::uint8_t>> sets;
        for (int i = 0; i < 52; ++i) { rows.push_back({10.0 + i * 0.01}); sets.push_back({1, 0, 0}); }
        for (int i = 0; i < 8; ++i) { rows.push_back({20.0 + i * 0.01}); sets.push_back({1, 1, 0}); }
        rows.push_back({0.00}); sets.push_back({0, 1, 1});
        rows.push_back({0.01}); sets.push_back({0, 1, 1});
        rows.push_back({0.02}); sets.push_back({0, 0, 1});
        rows.push_back({0.03}); sets.push_back({0, 0, 1});
        MultilabelDataset cluster({{"x", {}}}, {"big", "half", "rare"}, std::move(rows),
                                  std::move(sets));
        const auto [out, report] = mlsmote(cluster, 3, 5);
        c.require(report.synthetic_count == 4, "mlsmote cluster: expected 4 synthetics");
        for (std::size_t i = cluster.size(); i < out.size(); ++i) {
            c.require(out.has_label(i, 2) && !out.has_label(i, 1) && !out.has_label(i, 0),
                      "mlsmote labelset violates the >(k+1)/2 ranking rule");
        }
    }
    {
        const auto [out, report] = remedial(testing_data::td4());
        c.require(out.size() == 5, "remedial TD4: expected 5 instances");
        c.require(out.labelset(1) == std::vector<std::uint8_t>{1, 0, 0} &&
                      out.labelset(2) == std::vector<std::uint8_t>{0, 1, 0},
                  "remedial TD4: I2 did not split into ({A}, {B})");
    }
}

void criterion8(Checker& c) {
    using Bits = std::vector<std::vector<std::uint8_t>>;

    c.require(hamming_loss({{1, 0, 0}, {0, 0, 1}}, {{1, 1, 0}, {0, 0, 1}}) == 1.0 / 6.0,
              "HL worked example");
    c.require(std::fabs(f1_sample({{1, 1}}, {{1, 0}}) - 2.0 / 3.0) < 1e-15,
              "sample F1 worked example");
    {
        Bits truths, preds;
        for (int i = 0; i < 10; ++i) {
            truths.push_back({1, i < 5 ? std::uint8_t{1} : std::uint8_t{0}});
            preds.push_back({1, 0});
        }
        c.require(macro_f1(truths, preds) == 0.5, "macro F1 worked example");
        c.require(micro_f1(truths, preds) == 0.8, "micro F1 worked example");
    }
    c.require(one_error({{1, 0}, {0, 1}}, {{0.9, 0.1}, {0.8, 0.2}}).value == 0.5,
              "one-error worked example");

    Rng rng(606);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.below(25);
        const std::size_t nl = 2 + rng.below(5);
        Bits truths(n, std::vector<std::uint8_t>(nl));
        Bits preds(n, std::vector<std::uint8_t>(nl));
        for (auto& row : truths) {
            for (auto& v : row) v = rng.uniform() < 0.4 ? 1 : 0;
        }
        for (auto& row : preds) {
            for (auto& v : row) v = rng.uniform() < 0.4 ? 1 : 0;
        }
        const auto want = oracle::evaluate_classification(truths, preds);
        auto close = [](double a, double b) {
            return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
        };
        c.require(close(hamming_loss(truths, preds), want.hamming_loss), "random HL");
        c.require(close(f1_sample(truths, preds), want.f1_sample), "random F1");
        c.require(close(macro_f1(truths, preds), want.macro_f1), "random MacroF1");
        c.require(close(micro_f1(truths, preds), want.micro_f1), "random MicroF1");
    }

    const auto clusters = testing_data::two_cluster_dataset(50, 5);
    const auto folds = make_folds(clusters, 5, 17);
    ResamplerSpec identity;
    ClassifierSpec mlknn;
    mlknn.k = 3;
    const auto cv = cross_validate(folds, identity, mlknn, 21);
    c.require(cv.mean[3] >= 0.9, "MLkNN micro-F1 below 0.9 on the separable toy dataset");
    char note[64];
    std::snprintf(note, sizeof(note), "toy micro-F1 %.4f", cv.mean[3]);
    c.note = note;
}

void criterion9(Checker& c) {
    // (a) generation time linear in the synthetic count, fixed model
    const auto ds = testing_data::imbalanced_dataset(300, 7);
    const auto fitted = MldmModel::fit(ds, acceptance_diffusion(), 3);
    const std::vector<std::size_t> counts = {50, 100, 200};
    std::vector<double> times;
    for (const auto count : counts) {
        double best = 1e300;
        for (int rep = 0; rep < 3; ++rep) {
            const double t0 = now_seconds();
            const auto g = fitted.generate(count, 11);
            best = std::min(best, now_seconds() - t0);
            if (g.rows.size() != count) c.failures.push_back("generate() short-changed");
        }
        times.push_back(best);
    }
    {
        const double n = double(counts.size());
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            sx += double(counts[i]);
            sy += times[i];
            sxx += double(counts[i]) * double(counts[i]);
            sxy += double(counts[i]) * times[i];
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double intercept = (sy - slope * sx) / n;
        double ss_res = 0.0, ss_tot = 0.0;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            ss_res += std::pow(times[i] - (intercept + slope * double(counts[i])), 2);
            ss_tot += std::pow(times[i] - sy / n, 2);
        }
        const double r2 = 1.0 - ss_res / ss_tot;
        c.require(slope > 0.0, "generation time slope not positive");
        c.require(r2 > 0.9, "generation time R^2 <= 0.9");
        char note[128];
        std::snprintf(note, sizeof(note), "gen R^2 %.4f", r2);
        c.note = note;
    }

    // (b) fit phase unaffected by P (same data, same seed, different quota)
    {
        const auto [o1, r25] = mldm_resample(ds, 25.0, timing_diffusion(), 5);
        const auto [o2, r50] = mldm_resample(ds, 50.0, timing_diffusion(), 5);
        const double hi = std::max(r25.fit_seconds, r50.fit_seconds);
        const double lo = std::min(r25.fit_seconds, r50.fit_seconds);
        c.require((hi - lo) / hi <= 0.2, "fit time varies more than 20% with P");
        c.require(r50.generate_seconds > r25.generate_seconds,
                  "doubling P did not increase generation time");
    }

    // (c) cloning baselines at emotions scale
    {
        const auto big = emotions_scale_dataset(1);
        for (const auto* method : {"lpros", "mlros", "remedial"}) {
            const double t0 = now_seconds();
            ResamplerSpec spec;
            spec.method = method;
            spec.p = 25.0;
            run_resampler(big, spec, 2);
            const double elapsed = now_seconds() - t0;
            if (elapsed >= 5.0) {
                c.failures.push_back(std::string(method) + " exceeded 5 s at emotions scale");
            }
        }
    }

    // (d) MLDM total time nearly constant across datasets (within 2x)
    {
        const auto small_ds = fixed_tail_dataset(300, 11);
        const auto large_ds = fixed_tail_dataset(900, 12);
        const auto [oa, ra] = mldm_resample(small_ds, 25.0, timing_diffusion(), 7);
        const auto [ob, rb] = mldm_resample(large_ds, 25.0, timing_diffusion(), 7);
        const double ta = ra.fit_seconds + ra.generate_seconds;
        const double tb = rb.fit_seconds + rb.generate_seconds;
        const double ratio = std::max(ta, tb) / std::min(ta, tb);
        c.require(ratio < 2.0, "MLDM total time varies by 2x or more across datasets");
        char note[160];
        std::snprintf(note, sizeof(note), "%s; |D| 300 vs 900: %.2fs vs %.2fs",
                      c.note.c_str(), ta, tb);
        c.note = note;
    }
}

void criterion10(Checker& c) {
    // library level: training, sampling, resampling
    const auto ds = testing_data::imbalanced_dataset(200, 77);
    const auto cfg = acceptance_diffusion();
    {
        const auto codec = ColumnCodec::fit(ds);
        const auto enc = codec.encode_dataset(ds);
        const auto layout = BlockLayout::from_codec(codec);
        auto small = cfg;
        small.epochs = 60;
        const auto m1 = train_diffusion(enc, layout, small, 9, codec.hash());
        const auto m2 = train_diffusion(enc, layout, small, 9, codec.hash());
        c.require(m1.loss_trace == m2.loss_trace, "training traces differ across runs");
        const auto s1 = sample_diffusion(m1, 20, 3);
        const auto s2 = sample_diffusion(m2, 20, 3);
        for (std::size_t i = 0; i < s1.size(); ++i) {
            if (s1[i].values != s2[i].values) {
                c.failures.push_back("sampled vectors differ across runs");
                break;
            }
        }
    }
    {
        auto small = cfg;
        small.epochs = 60;
        const auto a = mldm_resample(ds, 20.0, small, 4);
        const auto b = mldm_resample(ds, 20.0, small, 4);
        c.require(a.first.equals(b.first), "mldm resample outputs differ across runs");
        c.require(write_arff(a.first) == write_arff(b.first),
                  "serialized resample outputs differ across runs");
    }

    // CLI level: byte-identical artifacts
    const auto dir = fs::temp_directory_path() / "mld_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto path = [&](const std::string& leaf) { return (dir / leaf).string(); };
    write_file(path("toy.arff"), write_arff(ds, "toy"));
    write_file(path("toy.xml"), write_label_header(ds));
    write_file(path("run.conf"),
               "seed = 5\nmethods = none,mlros\nfolds = 3\nmlknn.k = 3\np = 20\n"
               "dataset.toy.arff = " + path("toy.arff") + "\n" +
               "dataset.toy.xml = " + path("toy.xml") + "\n");

    const auto r1 = run_cli("resample --arff " + path("toy.arff") + " --xml " +
                            path("toy.xml") + " --method mlros --p 20 --seed 7 --out " +
                            path("a1.arff"));
    const auto r2 = run_cli("resample --arff " + path("toy.arff") + " --xml " +
                            path("toy.xml") + " --method mlros --p 20 --seed 7 --out " +
                            path("a2.arff"));
    c.require(r1.exit_code == 0 && r2.exit_code == 0, "cli resample failed");
    c.require(read_file(path("a1.arff")) == read_file(path("a2.arff")),
              "cli resample ARFF differs across runs");

    const auto e1 = run_cli("evaluate --config " + path("run.conf") + " --json " +
                            path("e1.json"));
    const auto e2 = run_cli("evaluate --config " + path("run.conf") + " --json " +
                            path("e2.json"));
    c.require(e1.exit_code == 0 && e2.exit_code == 0, "cli evaluate failed");
    c.require(read_file(path("e1.json")) == read_file(path("e2.json")),
              "cli evaluate JSON differs across runs");
    fs::remove_all(dir);
}

struct Criterion {
    int id;
    const char* title;
    std::function<void(Checker&)> body;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "Table 1 reproduction (emotions/scene or TD4 fallback)", criterion1},
        {2, "metric oracle equivalence (TD4 + 100 random datasets, 1e-12)", metric_oracle_suite},
        {3, "diffusion forward consistency (gaussian + categorical)", criterion3},
        {4, "denoiser gradient correctness vs central differences", criterion4},
        {5, "generative sanity on the N(3,1) column", criterion5},
        {6, "imbalance reduction on the engineered MLD, 5 seeds", criterion6},
        {7, "baseline resampler contracts", criterion7},
        {8, "evaluation metric correctness and MLkNN sanity", criterion8},
        {9, "efficiency: linear generation, constant fit, fast baselines", criterion9},
        {10, "end-to-end determinism (library and CLI)", criterion10},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        Checker check;
        const double t0 = now_seconds();
        try {
            criterion.body(check);
        } catch (const std::exception& e) {
            check.failures.push_back(std::string("exception: ") + e.what());
        }
        const double elapsed = now_seconds() - t0;
        std::printf("criterion %2d  %s  %-58s (%.1fs)%s%s\n", criterion.id,
                    check.passed() ? "PASS" : "FAIL", criterion.title, elapsed,
                    check.note.empty() ? "" : "  -- ", check.note.c_str());
        if (!check.passed()) {
            ++failures;
            for (const auto& reason : check.failures) {
                std::printf("              - %s\n", reason.c_str());
            }
        }
    }
    if (failures) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
