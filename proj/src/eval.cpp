#include "mld/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

#include "mld/error.hpp"
#include "mld/metrics.hpp"
#include "mld/rng.hpp"

namespace mld {

namespace {

void check_lengths(const std::vector<std::vector<std::uint8_t>>& truths,
                   std::size_t pred_count) {
    if (truths.empty()) throw Error("metrics need at least one instance");
    if (truths.size() != pred_count) {
        throw Error("truth and prediction counts differ: " + std::to_string(truths.size()) +
                    " vs " + std::to_string(pred_count));
    }
}

std::string format4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace

double hamming_loss(const std::vector<std::vector<std::uint8_t>>& truths,
                    const std::vector<std::vector<std::uint8_t>>& preds) {
    check_lengths(truths, preds.size());
    const double nl = double(truths.front().size());
    double acc = 0.0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        std::size_t diff = 0;
        for (std::size_t l = 0; l < truths[i].size(); ++l) {
            diff += truths[i][l] != preds[i][l] ? 1 : 0;
        }
        acc += double(diff) / nl;
    }
    return acc / double(truths.size());
}

double f1_sample(const std::vector<std::vector<std::uint8_t>>& truths,
                 const std::vector<std::vector<std::uint8_t>>& preds) {
    check_lengths(truths, preds.size());
    double precision = 0.0, recall = 0.0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        std::size_t inter = 0, y = 0, z = 0;
        for (std::size_t l = 0; l < truths[i].size(); ++l) {
            y += truths[i][l];
            z += preds[i][l];
            inter += (truths[i][l] && preds[i][l]) ? 1 : 0;
        }
        precision += z == 0 ? 0.0 : double(inter) / double(z);
        recall += y == 0 ? 0.0 : double(inter) / double(y);
    }
    precision /= double(truths.size());
    recall /= double(truths.size());
    return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

double macro_f1(const std::vector<std::vector<std::uint8_t>>& truths,
                const std::vector<std::vector<std::uint8_t>>& preds) {
    check_lengths(truths, preds.size());
    const std::size_t nl = truths.front().size();
    double acc = 0.0;
    for (std::size_t l = 0; l < nl; ++l) {
        std::size_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < truths.size(); ++i) {
            if (truths[i][l] && preds[i][l]) ++tp;
            if (!truths[i][l] && preds[i][l]) ++fp;
            if (truths[i][l] && !preds[i][l]) ++fn;
        }
        const double denom = double(2 * tp + fp + fn);
        acc += denom == 0.0 ? 0.0 : 2.0 * double(tp) / denom;
    }
    return acc / double(nl);
}

double micro_f1(const std::vector<std::vector<std::uint8_t>>& truths,
                const std::vector<std::vector<std::uint8_t>>& preds) {
    check_lengths(truths, preds.size());
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        for (std::size_t l = 0; l < truths[i].size(); ++l) {
            if (truths[i][l] && preds[i][l]) ++tp;
            if (!truths[i][l] && preds[i][l]) ++fp;
            if (truths[i][l] && !preds[i][l]) ++fn;
        }
    }
    const double denom = double(2 * tp + fp + fn);
    return denom == 0.0 ? 0.0 : 2.0 * double(tp) / denom;
}

OneErrorResult one_error(const std::vector<std::vector<std::uint8_t>>& truths,
                         const std::vector<std::vector<double>>& scores) {
    check_lengths(truths, scores.size());
    OneErrorResult out;
    std::size_t wrong = 0, used = 0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        const bool any = std::any_of(truths[i].begin(), truths[i].end(),
                                     [](std::uint8_t b) { return b != 0; });
        if (!any) {
            ++out.skipped;
            continue;
        }
        std::size_t top = 0;
        for (std::size_t l = 1; l < scores[i].size(); ++l) {
            if (scores[i][l] > scores[i][top]) top = l;
        }
        wrong += truths[i][top] ? 0 : 1;
        ++used;
    }
    if (used == 0) throw Error("one_error: every instance has an empty labelset");
    out.value = double(wrong) / double(used);
    return out;
}

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

void ResamplerSpec::validate() const {
    static const char* known[] = {"none", "mldm", "lpros", "mlros", "mlsmote", "remedial"};
    if (std::find_if(std::begin(known), std::end(known), [&](const char* m) {
            return method == m;
        }) == std::end(known)) {
        throw ConfigError("unknown resampling method '" + method + "'");
    }
    if ((method == "mldm" || method == "lpros" || method == "mlros") && !(p > 0.0)) {
        throw ConfigError("--p must be positive for method '" + method + "'");
    }
    if (method == "mlsmote" && k < 1) throw ConfigError("--k must be at least 1");
    if (method == "mldm") diffusion.validate();
}

ResampleResult run_resampler(const MultilabelDataset& train, const ResamplerSpec& spec,
                             std::uint64_t seed) {
    if (spec.method == "none") {
        ResamplingReport report;
        report.algorithm = "none";
        report.seed = seed;
        report.input_size = report.output_size = train.size();
        report.mean_ir_before = report.mean_ir_after = mean_ir(train);
        return {train, std::move(report)};
    }
    if (spec.method == "mldm") return mldm_resample(train, spec.p, spec.diffusion, seed);
    if (spec.method == "lpros") return lpros(train, spec.p, seed);
    if (spec.method == "mlros") return mlros(train, spec.p, seed);
    if (spec.method == "mlsmote") return mlsmote(train, spec.k, seed);
    if (spec.method == "remedial") return remedial(train);
    throw ConfigError("unknown resampling method '" + spec.method + "'");
}

namespace {

FoldMetrics evaluate_fold(const MultilabelDataset& train, const MultilabelDataset& test,
                          const ResamplerSpec& resampler, const ClassifierSpec& classifier,
                          std::uint64_t fold_seed, ResamplingReport& report_out) {
    auto [resampled, report] = run_resampler(train, resampler, fold_seed);
    report_out = std::move(report);

    const auto model = MlknnModel::train(resampled, classifier.k, classifier.smoothing);
    const auto predictions = model.predict_all(test);

    std::vector<std::vector<std::uint8_t>> truths;
    std::vector<std::vector<std::uint8_t>> bips;
    std::vector<std::vector<double>> scores;
    truths.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        truths.push_back(test.labelset(i));
        bips.push_back(predictions[i].bipartition);
        scores.push_back(predictions[i].scores);
    }

    FoldMetrics m;
    m.values[0] = hamming_loss(truths, bips);
    m.values[1] = f1_sample(truths, bips);
    m.values[2] = macro_f1(truths, bips);
    m.values[3] = micro_f1(truths, bips);
    const auto oe = one_error(truths, scores);
    m.values[4] = oe.value;
    m.oe_skipped = oe.skipped;
    return m;
}

}  // namespace

CvResult cross_validate(const FoldSet& folds, const ResamplerSpec& resampler,
                        const ClassifierSpec& classifier, std::uint64_t seed, int jobs) {
    if (folds.fold_count() < 2) throw ConfigError("cross-validation needs at least 2 folds");
    resampler.validate();
    check_fold_schemas(folds);

    const std::size_t n = folds.fold_count();
    CvResult result;
    result.folds.resize(n);
    result.resampling.resize(n);

    auto run_fold = [&](std::size_t f) {
        const auto& [train, test] = folds.folds[f];
        // the test split must reach the classifier untouched
        const std::size_t test_size_before = test.size();
        result.folds[f] = evaluate_fold(train, test, resampler, classifier,
                                        derive_seed(seed, f), result.resampling[f]);
        if (test.size() != test_size_before) {
            throw Error("internal: a test split changed size during evaluation");
        }
    };

    if (jobs <= 1) {
        for (std::size_t f = 0; f < n; ++f) run_fold(f);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(n);
        for (std::size_t f = 0; f < n; ++f) {
            pool.emplace_back([&, f]() {
                try {
                    run_fold(f);
                } catch (...) {
                    errors[f] = std::current_exception();
                }
            });
            if (pool.size() == static_cast<std::size_t>(jobs) || f + 1 == n) {
                for (auto& th : pool) th.join();
                pool.clear();
            }
        }
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    for (std::size_t m = 0; m < result.mean.size(); ++m) {
        double sum = 0.0;
        for (const auto& fm : result.folds) sum += fm.values[m];
        result.mean[m] = sum / double(n);
        double var = 0.0;
        for (const auto& fm : result.folds) {
            const double d = fm.values[m] - result.mean[m];
            var += d * d;
        }
        result.stdev[m] = n > 1 ? std::sqrt(var / double(n - 1)) : 0.0;
    }
    return result;
}

std::vector<double> average_ranks(const std::vector<std::vector<double>>& cells,
                                  const std::vector<bool>& higher_better) {
    if (cells.empty()) throw Error("average_ranks needs at least one cell");
    if (cells.size() != higher_better.size()) {
        throw Error("cells and directions differ in length");
    }
    const std::size_t nr = cells.front().size();
    std::vector<double> mean_rank(nr, 0.0);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].size() != nr) throw Error("ragged rank grid: a cell is missing values");
        // order values so position 0 is best
        std::vector<std::size_t> order(nr);
        std::iota(order.begin(), order.end(), std::size_t{0});
        const bool higher = higher_better[c];
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return higher ? cells[c][a] > cells[c][b] : cells[c][a] < cells[c][b];
        });
        // assign average ranks within tied runs
        std::size_t pos = 0;
        while (pos < nr) {
            std::size_t end = pos + 1;
            while (end < nr && cells[c][order[end]] == cells[c][order[pos]]) ++end;
            const double shared = (double(pos + 1) + double(end)) / 2.0;
            for (std::size_t q = pos; q < end; ++q) mean_rank[order[q]] += shared;
            pos = end;
        }
    }
    for (auto& r : mean_rank) r /= double(cells.size());
    return mean_rank;
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

std::vector<double> EvaluationReport::ranks_for_metric(std::size_t metric) const {
    std::vector<std::vector<double>> cells;
    std::vector<bool> dirs;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        std::vector<double> cell;
        for (std::size_t m = 0; m < methods.size(); ++m) {
            cell.push_back(results[d][m].mean[metric]);
        }
        cells.push_back(std::move(cell));
        dirs.push_back(kHigherIsBetter[metric]);
    }
    return average_ranks(cells, dirs);
}

std::vector<double> EvaluationReport::overall_ranks() const {
    std::vector<std::vector<double>> cells;
    std::vector<bool> dirs;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
            std::vector<double> cell;
            for (std::size_t m = 0; m < methods.size(); ++m) {
                cell.push_back(results[d][m].mean[metric]);
            }
            cells.push_back(std::move(cell));
            dirs.push_back(kHigherIsBetter[metric]);
        }
    }
    return average_ranks(cells, dirs);
}

nlohmann::json EvaluationReport::to_json() const {
    nlohmann::json j;
    j["schema"] = 1;
    j["seed"] = seed;
    j["metrics"] = kMetricNames;
    j["datasets"] = datasets;
    j["methods"] = methods;
    auto& grid = j["results"] = nlohmann::json::object();
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        auto& per_dataset = grid[datasets[d]] = nlohmann::json::object();
        for (std::size_t m = 0; m < methods.size(); ++m) {
            const auto& cv = results[d][m];
            nlohmann::json cell;
            for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
                nlohmann::json entry;
                entry["mean"] = cv.mean[metric];
                entry["std"] = cv.stdev[metric];
                nlohmann::json per_fold = nlohmann::json::array();
                for (const auto& fm : cv.folds) per_fold.push_back(fm.values[metric]);
                entry["folds"] = per_fold;
                cell[kMetricNames[metric]] = entry;
            }
            std::size_t skipped = 0;
            for (const auto& fm : cv.folds) skipped += fm.oe_skipped;
            cell["oe_skipped"] = skipped;
            nlohmann::json resamp = nlohmann::json::array();
            for (const auto& rep : cv.resampling) resamp.push_back(rep.to_json(false));
            cell["resampling"] = resamp;
            per_dataset[methods[m]] = cell;
        }
    }
    auto& ranks = j["average_ranks"] = nlohmann::json::object();
    for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
        const auto r = ranks_for_metric(metric);
        nlohmann::json per_method;
        for (std::size_t m = 0; m < methods.size(); ++m) per_method[methods[m]] = r[m];
        ranks[kMetricNames[metric]] = per_method;
    }
    {
        const auto r = overall_ranks();
        nlohmann::json per_method;
        for (std::size_t m = 0; m < methods.size(); ++m) per_method[methods[m]] = r[m];
        ranks["overall"] = per_method;
    }
    return j;
}

std::string EvaluationReport::to_table() const {
    std::size_t method_width = 8;
    for (const auto& m : methods) method_width = std::max(method_width, m.size() + 2);
    const std::size_t cell_width = std::max<std::size_t>(16, 15);

    std::string out;
    for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
        out += std::string("== ") + kMetricNames[metric] +
               (kHigherIsBetter[metric] ? " (higher is better) ==" : " (lower is better) ==");
        out += "\n";
        out += std::string(method_width, ' ');
        for (const auto& d : datasets) {
            out += d.size() >= cell_width ? " " + d : std::string(cell_width - d.size(), ' ') + d;
        }
        out += std::string(10, ' ') + "rank\n";
        const auto ranks = ranks_for_metric(metric);
        for (std::size_t m = 0; m < methods.size(); ++m) {
            out += methods[m] + std::string(method_width - methods[m].size(), ' ');
            for (std::size_t d = 0; d < datasets.size(); ++d) {
                const std::string cell = format4(results[d][m].mean[metric]) + "±" +
                                         format4(results[d][m].stdev[metric]);
                // the ± glyph is two bytes; pad by display length
                const std::size_t display = cell.size() - 1;
                out += display >= cell_width ? " " + cell
                                             : std::string(cell_width - display, ' ') + cell;
            }
            out += std::string(10, ' ') + format4(ranks[m]) + "\n";
        }
        out += "\n";
    }
    {
        out += "== mean rank over all cells ==\n";
        const auto r = overall_ranks();
        for (std::size_t m = 0; m < methods.size(); ++m) {
            out += methods[m] + std::string(method_width - methods[m].size(), ' ') +
                   format4(r[m]) + "\n";
        }
    }
    return out;
}

std::string EvaluationReport::to_csv() const {
    std::string out = "dataset,method,metric,mean,std\n";
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        for (std::size_t m = 0; m < methods.size(); ++m) {
            for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
                out += datasets[d] + "," + methods[m] + "," + kMetricNames[metric] + "," +
                       format4(results[d][m].mean[metric]) + "," +
                       format4(results[d][m].stdev[metric]) + "\n";
            }
        }
    }
    return out;
}

}  // namespace mld
