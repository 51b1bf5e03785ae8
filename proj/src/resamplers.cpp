#include "mld/resamplers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

#include "mld/arff.hpp"
#include "mld/distance.hpp"
#include "mld/error.hpp"
#include "mld/metrics.hpp"
#include "mld/rng.hpp"

namespace mld {

namespace {

constexpr std::uint64_t kFitStream = 0x666974;   // "fit"
constexpr std::uint64_t kGenStream = 0x67656e;   // "gen"

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::int64_t quota_for(double p, std::size_t n) {
    return std::llround(p / 100.0 * static_cast<double>(n));
}

void finish_report(ResamplingReport& report, const MultilabelDataset& before,
                   const MultilabelDataset& after) {
    report.input_size = before.size();
    report.output_size = after.size();
    report.mean_ir_before = mean_ir(before);
    report.mean_ir_after = mean_ir(after);
    report.improvement_pct = meanir_improvement(report.mean_ir_before, report.mean_ir_after);
}

}  // namespace

nlohmann::json ResamplingReport::to_json(bool include_timings) const {
    nlohmann::json j;
    j["schema"] = 1;
    j["algorithm"] = algorithm;
    if (p > 0.0) j["p"] = p;
    if (k > 0) j["k"] = k;
    j["seed"] = seed;
    j["input_size"] = input_size;
    j["output_size"] = output_size;
    j["synthetic_count"] = synthetic_count;
    j["mean_ir_before"] = mean_ir_before;
    j["mean_ir_after"] = mean_ir_after;
    j["improvement_pct"] = improvement_pct;
    if (include_timings) {
        j["timings"] = {{"fit_seconds", fit_seconds},
                        {"generate_seconds", generate_seconds},
                        {"total_seconds", fit_seconds + generate_seconds}};
    }
    j["warning"] = warning;
    j["notes"] = notes;
    if (algorithm == "mldm") {
        j["attempts"] = attempts;
        j["fallbacks"] = fallbacks;
    }
    return j;
}

// ---------------------------------------------------------------------------
// MLDM
// ---------------------------------------------------------------------------

MldmModel MldmModel::fit(const MultilabelDataset& ds, const DiffusionConfig& config,
                         std::uint64_t seed) {
    config.validate();
    const auto profile = compute_profile(ds);
    if (profile.minority_labels.empty()) {
        throw Error("mldm: dataset has no minority labels to oversample");
    }

    std::vector<std::vector<double>> rows;
    std::vector<std::vector<std::uint8_t>> labelsets;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto& set = ds.labelset(i);
        const bool keep = std::any_of(profile.minority_labels.begin(),
                                      profile.minority_labels.end(),
                                      [&](std::size_t l) { return set[l] != 0; });
        if (keep) {
            rows.push_back(ds.row(i));
            labelsets.push_back(set);
        }
    }
    if (rows.empty()) throw Error("mldm: no instances carry a minority label");
    MultilabelDataset subset(ds.columns(), ds.labels(), std::move(rows), std::move(labelsets));

    MldmModel out;
    out.minority_ = profile.minority_labels;
    out.train_subset_size_ = subset.size();
    out.codec_ = ColumnCodec::fit(subset);
    out.model_ = train_diffusion(out.codec_.encode_dataset(subset),
                                 BlockLayout::from_codec(out.codec_), config,
                                 derive_seed(seed, kFitStream), out.codec_.hash());
    return out;
}

MldmModel::Generated MldmModel::generate(std::size_t count, std::uint64_t seed) const {
    Generated out;
    if (count == 0) return out;
    const std::uint64_t gen_seed = derive_seed(seed, kGenStream);
    const std::size_t attempt_cap = 10 * count;

    while (out.rows.size() < count) {
        const auto sample = sample_diffusion(model_, 1, derive_seed(gen_seed, out.attempts));
        ++out.attempts;
        auto [features, labelset] = codec_.decode(sample.front().values);
        const bool has_minority = std::any_of(minority_.begin(), minority_.end(),
                                              [&](std::size_t l) { return labelset[l] != 0; });
        if (!has_minority) {
            if (out.attempts < attempt_cap) continue;
            // force the minority label the model scored highest
            std::size_t best = minority_.front();
            double best_score = -1.0;
            for (std::size_t l : minority_) {
                const double score =
                    sample.front().scores[codec_.label_offset(l) + 1];
                if (score > best_score) {
                    best_score = score;
                    best = l;
                }
            }
            labelset[best] = 1;
            ++out.fallbacks;
        }
        out.rows.push_back(std::move(features));
        out.labelsets.push_back(std::move(labelset));
    }
    return out;
}

void MldmModel::save(const std::string& model_path) const {
    save_model(model_, model_path);
    nlohmann::json side;
    side["version"] = 1;
    side["codec"] = codec_.to_json();
    side["minority"] = minority_;
    side["train_subset_size"] = train_subset_size_;
    write_file(model_path + ".codec.json", side.dump(2) + "\n");
}

MldmModel MldmModel::load(const std::string& model_path) {
    nlohmann::json side;
    try {
        side = nlohmann::json::parse(read_file(model_path + ".codec.json"));
    } catch (const nlohmann::json::exception& e) {
        throw Error("cannot parse codec sidecar for '" + model_path + "': " + e.what());
    }
    if (!side.contains("version") || side.at("version").get<int>() != 1) {
        throw Error("unsupported codec sidecar version");
    }
    MldmModel out;
    out.codec_ = ColumnCodec::from_json(side.at("codec"));
    out.minority_ = side.at("minority").get<std::vector<std::size_t>>();
    out.train_subset_size_ = side.at("train_subset_size").get<std::size_t>();
    out.model_ = load_model(model_path, out.codec_.hash());
    return out;
}

ResampleResult mldm_resample(const MultilabelDataset& ds, double p,
                             const DiffusionConfig& config, std::uint64_t seed,
                             const MldmModel* prefitted) {
    if (!(p > 0.0)) throw ConfigError("--p must be positive");
    if (ds.size() == 0) throw Error("mldm: empty dataset");

    ResamplingReport report;
    report.algorithm = "mldm";
    report.p = p;
    report.seed = seed;

    const auto fit_start = Clock::now();
    MldmModel local;
    const MldmModel* model = prefitted;
    if (model == nullptr) {
        local = MldmModel::fit(ds, config, seed);
        model = &local;
    }
    report.fit_seconds = seconds_since(fit_start);

    const auto gen_start = Clock::now();
    const auto target = static_cast<std::size_t>(quota_for(p, ds.size()));
    auto generated = model->generate(target, seed);
    auto out = ds.append_instances(generated.rows, generated.labelsets);
    report.generate_seconds = seconds_since(gen_start);

    report.synthetic_count = generated.rows.size();
    report.attempts = generated.attempts;
    report.fallbacks = generated.fallbacks;
    if (generated.fallbacks > 0) {
        report.notes.push_back(std::to_string(generated.fallbacks) +
                               " instance(s) needed the minority-label fallback");
    }
    finish_report(report, ds, out);
    return {std::move(out), std::move(report)};
}

// ---------------------------------------------------------------------------
// LPROS
// ---------------------------------------------------------------------------

ResampleResult lpros(const MultilabelDataset& ds, double p, std::uint64_t seed) {
    if (!(p > 0.0)) throw ConfigError("--p must be positive");
    ResamplingReport report;
    report.algorithm = "lpros";
    report.p = p;
    report.seed = seed;

    const auto start = Clock::now();
    struct Bag {
        std::vector<std::size_t> members;
        std::size_t first = 0;
    };
    std::map<std::vector<std::uint8_t>, Bag> bags;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        auto [it, inserted] = bags.try_emplace(ds.labelset(i));
        if (inserted) it->second.first = i;
        it->second.members.push_back(i);
    }

    const double mean_size = double(ds.size()) / double(bags.size());
    std::vector<const Bag*> minority;
    for (const auto& [key, bag] : bags) {
        if (double(bag.members.size()) < mean_size) minority.push_back(&bag);
    }
    std::sort(minority.begin(), minority.end(), [](const Bag* a, const Bag* b) {
        if (a->members.size() != b->members.size()) {
            return a->members.size() < b->members.size();
        }
        return a->first < b->first;
    });

    std::vector<std::vector<double>> new_rows;
    std::vector<std::vector<std::uint8_t>> new_sets;
    if (minority.empty()) {
        report.warning = true;
        report.notes.push_back("no labelset bag is below the mean size; dataset unchanged");
    } else {
        const auto quota = static_cast<std::size_t>(quota_for(p, ds.size()));
        const std::size_t share = quota / minority.size();
        const std::size_t remainder = quota % minority.size();
        Rng rng(derive_seed(seed, kGenStream));
        for (std::size_t b = 0; b < minority.size(); ++b) {
            const auto& bag = *minority[b];
            std::size_t want = share + (b < remainder ? 1 : 0);
            const auto cap = static_cast<std::size_t>(
                std::max(0.0, std::ceil(mean_size - double(bag.members.size()))));
            want = std::min(want, cap);
            for (std::size_t c = 0; c < want; ++c) {
                const std::size_t donor = bag.members[rng.below(bag.members.size())];
                new_rows.push_back(ds.row(donor));
                new_sets.push_back(ds.labelset(donor));
            }
        }
    }

    auto out = ds.append_instances(new_rows, new_sets);
    report.synthetic_count = new_rows.size();
    report.generate_seconds = seconds_since(start);
    finish_report(report, ds, out);
    return {std::move(out), std::move(report)};
}

// ---------------------------------------------------------------------------
// MLROS
// ---------------------------------------------------------------------------

ResampleResult mlros(const MultilabelDataset& ds, double p, std::uint64_t seed) {
    if (!(p > 0.0)) throw ConfigError("--p must be positive");
    ResamplingReport report;
    report.algorithm = "mlros";
    report.p = p;
    report.seed = seed;

    const auto start = Clock::now();
    const std::size_t nl = ds.label_count();
    std::vector<std::vector<std::size_t>> carriers(nl);
    std::vector<std::size_t> counts(nl, 0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t l = 0; l < nl; ++l) {
            if (ds.has_label(i, l)) {
                carriers[l].push_back(i);
                ++counts[l];
            }
        }
    }

    auto minority_from_counts = [&]() {
        std::vector<std::size_t> minority;
        const std::size_t max_count = *std::max_element(counts.begin(), counts.end());
        double sum = 0.0;
        std::size_t considered = 0;
        for (std::size_t l = 0; l < nl; ++l) {
            if (counts[l] == 0) continue;
            sum += double(max_count) / double(counts[l]);
            ++considered;
        }
        const double mean = sum / double(considered);
        for (std::size_t l = 0; l < nl; ++l) {
            if (counts[l] > 0 && double(max_count) / double(counts[l]) > mean) {
                minority.push_back(l);
            }
        }
        return minority;
    };

    const auto quota = static_cast<std::size_t>(quota_for(p, ds.size()));
    std::vector<std::vector<double>> new_rows;
    std::vector<std::vector<std::uint8_t>> new_sets;
    Rng rng(derive_seed(seed, kGenStream));
    auto minority = minority_from_counts();
    if (minority.empty()) {
        report.warning = true;
        report.notes.push_back("no label exceeds the mean imbalance ratio; dataset unchanged");
    }
    std::size_t cursor = 0;
    while (new_rows.size() < quota && !minority.empty()) {
        const std::size_t label = minority[cursor % minority.size()];
        ++cursor;
        const auto& bag = carriers[label];
        const std::size_t donor = bag[rng.below(bag.size())];
        new_rows.push_back(ds.row(donor));
        new_sets.push_back(ds.labelset(donor));
        for (std::size_t l = 0; l < nl; ++l) {
            if (ds.has_label(donor, l)) ++counts[l];
        }
        if (new_rows.size() % 10 == 0) {
            minority = minority_from_counts();
            cursor = 0;
        }
    }

    auto out = ds.append_instances(new_rows, new_sets);
    report.synthetic_count = new_rows.size();
    report.generate_seconds = seconds_since(start);
    finish_report(report, ds, out);
    return {std::move(out), std::move(report)};
}

// ---------------------------------------------------------------------------
// MLSMOTE
// ---------------------------------------------------------------------------

ResampleResult mlsmote(const MultilabelDataset& ds, int k, std::uint64_t seed) {
    if (k < 1) throw ConfigError("--k must be at least 1");
    ResamplingReport report;
    report.algorithm = "mlsmote";
    report.k = k;
    report.seed = seed;

    const auto start = Clock::now();
    Rng rng(derive_seed(seed, kGenStream));
    auto current = ds;

    for (std::size_t label = 0; label < ds.label_count(); ++label) {
        const auto profile = compute_profile(current);
        if (profile.label_counts[label] == 0 || !(profile.irlbl[label] > profile.mean_ir)) {
            continue;
        }
        std::vector<std::size_t> bag;
        for (std::size_t i = 0; i < current.size(); ++i) {
            if (current.has_label(i, label)) bag.push_back(i);
        }
        if (bag.size() < static_cast<std::size_t>(k) + 1) {
            report.notes.push_back("label '" + ds.labels()[label] + "' skipped: only " +
                                   std::to_string(bag.size()) + " carriers for k=" +
                                   std::to_string(k));
            continue;
        }

        const FeatureDistance dist(current);
        std::vector<std::vector<double>> new_rows;
        std::vector<std::vector<std::uint8_t>> new_sets;
        for (const std::size_t seed_idx : bag) {
            const auto neighbors = dist.nearest(current, current.row(seed_idx), bag,
                                                static_cast<std::size_t>(k), seed_idx);
            const std::size_t ref_idx = neighbors[rng.below(neighbors.size())];

            std::vector<double> row(current.feature_count());
            for (std::size_t c = 0; c < current.feature_count(); ++c) {
                if (current.columns()[c].numeric()) {
                    const double a = current.value(seed_idx, c);
                    const double b = current.value(ref_idx, c);
                    row[c] = a + rng.uniform() * (b - a);
                } else {
                    // majority category over seed + neighbors, seed wins ties
                    std::vector<std::size_t> votes(current.columns()[c].categories.size(), 0);
                    ++votes[static_cast<std::size_t>(current.value(seed_idx, c))];
                    for (auto n : neighbors) {
                        ++votes[static_cast<std::size_t>(current.value(n, c))];
                    }
                    const auto seed_cat = static_cast<std::size_t>(current.value(seed_idx, c));
                    std::size_t best = seed_cat;
                    for (std::size_t cat = 0; cat < votes.size(); ++cat) {
                        if (votes[cat] > votes[best]) best = cat;
                    }
                    row[c] = static_cast<double>(best);
                }
            }

            // ranking rule: keep labels present in more than half of the group
            std::vector<std::uint8_t> labelset(current.label_count(), 0);
            const double threshold = double(k + 1) / 2.0;
            for (std::size_t l = 0; l < current.label_count(); ++l) {
                std::size_t votes = current.has_label(seed_idx, l) ? 1 : 0;
                for (auto n : neighbors) votes += current.has_label(n, l) ? 1 : 0;
                labelset[l] = double(votes) > threshold ? 1 : 0;
            }
            new_rows.push_back(std::move(row));
            new_sets.push_back(std::move(labelset));
        }
        current = current.append_instances(new_rows, new_sets);
        report.synthetic_count += new_rows.size();
    }

    report.generate_seconds = seconds_since(start);
    finish_report(report, ds, current);
    return {std::move(current), std::move(report)};
}

// ---------------------------------------------------------------------------
// REMEDIAL
// ---------------------------------------------------------------------------

ResampleResult remedial(const MultilabelDataset& ds) {
    ResamplingReport report;
    report.algorithm = "remedial";

    const auto start = Clock::now();
    const auto profile = compute_profile(ds);

    std::vector<std::vector<double>> rows;
    std::vector<std::vector<std::uint8_t>> sets;
    std::size_t splits = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (!(profile.scumble_per_instance[i] > profile.scumble)) {
            rows.push_back(ds.row(i));
            sets.push_back(ds.labelset(i));
            continue;
        }
        std::vector<std::uint8_t> majority(ds.label_count(), 0);
        std::vector<std::uint8_t> minority(ds.label_count(), 0);
        for (std::size_t l = 0; l < ds.label_count(); ++l) {
            if (!ds.has_label(i, l)) continue;
            if (profile.irlbl[l] > profile.mean_ir) {
                minority[l] = 1;
            } else {
                majority[l] = 1;
            }
        }
        rows.push_back(ds.row(i));
        sets.push_back(std::move(majority));
        rows.push_back(ds.row(i));
        sets.push_back(std::move(minority));
        ++splits;
    }

    MultilabelDataset out(ds.columns(), ds.labels(), std::move(rows), std::move(sets));
    report.synthetic_count = splits;
    report.generate_seconds = seconds_since(start);
    if (splits == 0) report.notes.push_back("no instance exceeds the mean SCUMBLE; unchanged");
    finish_report(report, ds, out);
    return {std::move(out), std::move(report)};
}

}  // namespace mld
