#include "mld/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mld/arff.hpp"
#include "mld/config.hpp"
#include "mld/error.hpp"
#include "mld/eval.hpp"
#include "mld/metrics.hpp"
#include "mld/resamplers.hpp"

namespace mld::cli {

namespace {

// Removes every registered artifact unless commit() ran, so failed commands
// never leave partial outputs behind.
class ArtifactGuard {
  public:
    ~ArtifactGuard() {
        if (committed_) return;
        for (const auto& path : paths_) {
            std::error_code ec;
            std::filesystem::remove(path, ec);
        }
    }
    void track(const std::string& path) {
        if (!path.empty()) paths_.push_back(path);
    }
    void commit() { committed_ = true; }

  private:
    std::vector<std::string> paths_;
    bool committed_ = false;
};

std::string format4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> p;
    std::optional<int> k;
    std::optional<int> jobs;
};

const std::vector<std::string> kSharedKeys = {
    "seed", "p",       "k",       "jobs",    "methods", "folds",
    "mlknn.k", "mlknn.s", "diffusion.steps", "diffusion.beta_start",
    "diffusion.beta_end", "diffusion.hidden", "diffusion.epochs", "diffusion.batch",
    "diffusion.lr", "diffusion.momentum", "diffusion.embed_width"};

KeyValueConfig load_config(const CommonOptions& opts) {
    KeyValueConfig cfg;
    if (!opts.config_path.empty()) cfg = KeyValueConfig::parse_file(opts.config_path);
    // flags override file values
    if (opts.seed) cfg.set("seed", std::to_string(*opts.seed));
    if (opts.p) cfg.set("p", std::to_string(*opts.p));
    if (opts.k) cfg.set("k", std::to_string(*opts.k));
    if (opts.jobs) cfg.set("jobs", std::to_string(*opts.jobs));
    return cfg;
}

DiffusionConfig diffusion_from(const KeyValueConfig& cfg) {
    DiffusionConfig d;
    d.steps = static_cast<int>(cfg.get_int("diffusion.steps", d.steps));
    d.beta_start = cfg.get_double("diffusion.beta_start", d.beta_start);
    d.beta_end = cfg.get_double("diffusion.beta_end", d.beta_end);
    for (const auto& h : cfg.get_list("diffusion.hidden")) {
        const auto width = std::strtoul(h.c_str(), nullptr, 10);
        if (width == 0) throw ConfigError("diffusion.hidden: bad layer width '" + h + "'");
        d.hidden.push_back(width);
    }
    d.epochs = static_cast<int>(cfg.get_int("diffusion.epochs", d.epochs));
    d.batch_size = static_cast<std::size_t>(cfg.get_int("diffusion.batch",
                                                        std::int64_t(d.batch_size)));
    d.learning_rate = cfg.get_double("diffusion.lr", d.learning_rate);
    d.momentum = cfg.get_double("diffusion.momentum", d.momentum);
    d.embed_width = static_cast<std::size_t>(cfg.get_int("diffusion.embed_width",
                                                         std::int64_t(d.embed_width)));
    d.validate();
    return d;
}

void require_file(const std::string& path, const std::string& flag) {
    if (path.empty()) throw ConfigError(flag + " is required");
    if (!std::filesystem::exists(path)) {
        throw ConfigError(flag + ": file '" + path + "' does not exist");
    }
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// ---------------------------------------------------------------------------
// inspect
// ---------------------------------------------------------------------------

struct InspectOptions {
    std::string arff, xml, csv_out;
};

int cmd_inspect(const InspectOptions& opts) {
    require_file(opts.arff, "--arff");
    require_file(opts.xml, "--xml");

    const auto start = std::chrono::steady_clock::now();
    const auto ds = load_mulan(opts.arff, opts.xml);
    const auto profile = compute_profile(ds);
    const double seconds = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start).count();

    std::printf("%-12s %s\n", "dataset", opts.arff.c_str());
    std::printf("%-12s %zu\n", "instances", ds.size());
    std::printf("%-12s %zu\n", "attributes", ds.feature_count());
    std::printf("%-12s %zu\n", "labels", ds.label_count());
    std::printf("%-12s %s\n", "card", format4(profile.card).c_str());
    std::printf("%-12s %s\n", "dens", format4(profile.dens).c_str());
    std::printf("%-12s %s\n", "meanir", format4(profile.mean_ir).c_str());
    std::printf("%-12s %s\n", "scumble", format4(profile.scumble).c_str());
    // wall-clock goes to stderr so stdout stays byte-stable across runs
    std::fprintf(stderr, "elapsed %.3fs\n", seconds);

    if (!opts.csv_out.empty()) {
        ArtifactGuard guard;
        guard.track(opts.csv_out);
        std::string csv = "dataset,instances,attributes,labels,card,dens,meanir,scumble\n";
        csv += opts.arff + "," + std::to_string(ds.size()) + "," +
               std::to_string(ds.feature_count()) + "," + std::to_string(ds.label_count()) +
               "," + format4(profile.card) + "," + format4(profile.dens) + "," +
               format4(profile.mean_ir) + "," + format4(profile.scumble) + "\n";
        write_file(opts.csv_out, csv);
        guard.commit();
    }
    return 0;
}

// ---------------------------------------------------------------------------
// resample
// ---------------------------------------------------------------------------

struct ResampleOptions {
    CommonOptions common;
    std::string arff, xml, method;
    std::string out, report_out;
    std::string save_model, load_model;
};

int cmd_resample(const ResampleOptions& opts) {
    require_file(opts.arff, "--arff");
    require_file(opts.xml, "--xml");
    if (opts.out.empty()) throw ConfigError("--out is required");

    const auto cfg = load_config(opts.common);
    cfg.require_known(kSharedKeys, {"dataset."});

    ResamplerSpec spec;
    spec.method = opts.method;
    spec.p = cfg.get_double("p", 25.0);
    spec.k = static_cast<int>(cfg.get_int("k", 3));
    spec.diffusion = diffusion_from(cfg);
    spec.validate();
    const auto seed = cfg.get_u64("seed", 0);

    if ((!opts.save_model.empty() || !opts.load_model.empty()) && spec.method != "mldm") {
        throw ConfigError("--save-model/--load-model apply to --method mldm only");
    }

    const auto ds = load_mulan(opts.arff, opts.xml);

    std::optional<MldmModel> prefitted;
    if (!opts.load_model.empty()) {
        require_file(opts.load_model, "--load-model");
        prefitted = MldmModel::load(opts.load_model);
    }

    ArtifactGuard guard;
    guard.track(opts.out);
    guard.track(opts.report_out);

    auto [augmented, report] =
        spec.method == "mldm"
            ? mldm_resample(ds, spec.p, spec.diffusion, seed,
                            prefitted ? &*prefitted : nullptr)
            : run_resampler(ds, spec, seed);

    write_file(opts.out, write_arff(augmented, "resampled"));
    if (!opts.report_out.empty()) {
        write_file(opts.report_out, report.to_json().dump(2) + "\n");
    }
    if (!opts.save_model.empty()) {
        guard.track(opts.save_model);
        guard.track(opts.save_model + ".codec.json");
        if (prefitted) {
            prefitted->save(opts.save_model);
        } else {
            MldmModel::fit(ds, spec.diffusion, seed).save(opts.save_model);
        }
    }
    guard.commit();

    std::printf("%s: %zu -> %zu instances (+%zu), MeanIR %s -> %s (%+.1f%%)\n",
                report.algorithm.c_str(), report.input_size, report.output_size,
                report.synthetic_count, format4(report.mean_ir_before).c_str(),
                format4(report.mean_ir_after).c_str(), report.improvement_pct);
    return 0;
}

// ---------------------------------------------------------------------------
// dataset sources shared by evaluate/bench
// ---------------------------------------------------------------------------

struct DatasetSource {
    std::string name;
    std::string arff, xml;                  // whole-file form
    std::string train_pattern, test_pattern;  // precomputed-folds form
    std::size_t folds = 0;
};

std::vector<DatasetSource> dataset_sources(const KeyValueConfig& cfg) {
    std::map<std::string, DatasetSource> sources;
    for (const auto& key : cfg.keys_with_prefix("dataset.")) {
        const auto rest = key.substr(8);
        const auto dot = rest.find('.');
        if (dot == std::string::npos) {
            throw ConfigError("config key '" + key + "': expected dataset.<name>.<field>");
        }
        const std::string name = rest.substr(0, dot);
        const std::string field = rest.substr(dot + 1);
        auto& src = sources[name];
        src.name = name;
        if (field == "arff") {
            src.arff = cfg.get(key);
        } else if (field == "xml") {
            src.xml = cfg.get(key);
        } else if (field == "train_pattern") {
            src.train_pattern = cfg.get(key);
        } else if (field == "test_pattern") {
            src.test_pattern = cfg.get(key);
        } else if (field == "folds") {
            src.folds = static_cast<std::size_t>(cfg.get_int(key, 0));
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    if (sources.empty()) throw ConfigError("config declares no dataset.<name> entries");

    std::vector<DatasetSource> out;
    for (auto& [name, src] : sources) {
        if (src.xml.empty()) {
            throw ConfigError("dataset." + name + ".xml is required");
        }
        const bool whole = !src.arff.empty();
        const bool pattern = !src.train_pattern.empty() || !src.test_pattern.empty();
        if (whole == pattern) {
            throw ConfigError("dataset." + name +
                              ": give either .arff or .train_pattern/.test_pattern");
        }
        if (pattern && (src.train_pattern.empty() || src.test_pattern.empty() ||
                        src.folds < 2)) {
            throw ConfigError("dataset." + name +
                              ": .train_pattern, .test_pattern and .folds >= 2 are required");
        }
        out.push_back(std::move(src));
    }
    return out;
}

std::string substitute_fold(const std::string& pattern, std::size_t fold) {
    const auto pos = pattern.find("{fold}");
    if (pos == std::string::npos) {
        throw ConfigError("fold pattern '" + pattern + "' lacks a {fold} placeholder");
    }
    return pattern.substr(0, pos) + std::to_string(fold) + pattern.substr(pos + 6);
}

MultilabelDataset load_whole(const DatasetSource& src) {
    require_file(src.arff, "dataset." + src.name + ".arff");
    require_file(src.xml, "dataset." + src.name + ".xml");
    return load_mulan(src.arff, src.xml);
}

FoldSet load_folds(const DatasetSource& src, std::size_t default_folds, std::uint64_t seed) {
    if (!src.arff.empty()) {
        return make_folds(load_whole(src), src.folds >= 2 ? src.folds : default_folds, seed);
    }
    require_file(src.xml, "dataset." + src.name + ".xml");
    const auto labels = parse_label_header(read_file(src.xml));
    FoldSet out;
    for (std::size_t f = 1; f <= src.folds; ++f) {
        const auto train_path = substitute_fold(src.train_pattern, f);
        const auto test_path = substitute_fold(src.test_pattern, f);
        require_file(train_path, "dataset." + src.name + ".train_pattern");
        require_file(test_path, "dataset." + src.name + ".test_pattern");
        out.folds.emplace_back(parse_arff(read_file(train_path), labels),
                               parse_arff(read_file(test_path), labels));
    }
    check_fold_schemas(out);
    return out;
}

ResamplerSpec spec_for(const std::string& method, const KeyValueConfig& cfg,
                       const DiffusionConfig& diffusion) {
    ResamplerSpec spec;
    spec.method = method;
    spec.p = cfg.get_double("p", 25.0);
    spec.k = static_cast<int>(cfg.get_int("k", 3));
    spec.diffusion = diffusion;
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateOptions {
    CommonOptions common;
    std::vector<std::string> methods;  // overrides config when non-empty
    std::string json_out, table_out, csv_out;
};

int cmd_evaluate(const EvaluateOptions& opts) {
    if (opts.common.config_path.empty()) throw ConfigError("--config is required");
    const auto cfg = load_config(opts.common);
    cfg.require_known(kSharedKeys, {"dataset."});

    auto methods = opts.methods.empty() ? cfg.get_list("methods") : opts.methods;
    if (methods.empty()) throw ConfigError("no resampling methods requested (--methods)");

    const auto diffusion = diffusion_from(cfg);
    for (const auto& m : methods) spec_for(m, cfg, diffusion);  // validate up front

    const auto seed = cfg.get_u64("seed", 0);
    const auto jobs = static_cast<int>(cfg.get_int("jobs", 1));
    const auto default_folds = static_cast<std::size_t>(cfg.get_int("folds", 5));
    ClassifierSpec classifier;
    classifier.k = static_cast<int>(cfg.get_int("mlknn.k", 10));
    classifier.smoothing = cfg.get_double("mlknn.s", 1.0);

    const auto sources = dataset_sources(cfg);

    EvaluationReport report;
    report.seed = seed;
    report.methods = methods;

    for (const auto& src : sources) {
        const auto folds = load_folds(src, default_folds, seed);
        report.datasets.push_back(src.name);
        std::vector<CvResult> row;
        for (const auto& method : methods) {
            row.push_back(cross_validate(folds, spec_for(method, cfg, diffusion), classifier,
                                         derive_seed(seed, fnv1a(src.name + "/" + method)),
                                         jobs));
        }
        report.results.push_back(std::move(row));
    }

    ArtifactGuard guard;
    guard.track(opts.json_out);
    guard.track(opts.table_out);
    guard.track(opts.csv_out);
    const auto table = report.to_table();
    if (!opts.json_out.empty()) write_file(opts.json_out, report.to_json().dump(2) + "\n");
    if (!opts.table_out.empty()) write_file(opts.table_out, table);
    if (!opts.csv_out.empty()) write_file(opts.csv_out, report.to_csv());
    guard.commit();

    std::fputs(table.c_str(), stdout);
    return 0;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchOptions {
    CommonOptions common;
    std::vector<std::string> methods;
    std::string json_out;
};

int cmd_bench(const BenchOptions& opts) {
    if (opts.common.config_path.empty()) throw ConfigError("--config is required");
    const auto cfg = load_config(opts.common);
    cfg.require_known(kSharedKeys, {"dataset."});

    auto methods = opts.methods.empty() ? cfg.get_list("methods") : opts.methods;
    if (methods.empty()) throw ConfigError("no resampling methods requested (--methods)");

    const auto diffusion = diffusion_from(cfg);
    for (const auto& m : methods) spec_for(m, cfg, diffusion);
    const auto seed = cfg.get_u64("seed", 0);
    const auto sources = dataset_sources(cfg);

    // rows: method, columns: dataset, cell: ResamplingReport
    std::vector<std::vector<ResamplingReport>> grid(methods.size());
    std::vector<std::string> dataset_names;
    for (const auto& src : sources) dataset_names.push_back(src.name);

    for (std::size_t d = 0; d < sources.size(); ++d) {
        const auto ds = load_whole(sources[d]);
        for (std::size_t m = 0; m < methods.size(); ++m) {
            auto [out, report] = run_resampler(ds, spec_for(methods[m], cfg, diffusion),
                                               derive_seed(seed, d));
            grid[m].push_back(std::move(report));
        }
    }

    // Total seconds, methods as rows and datasets as columns.
    std::size_t name_width = 10;
    for (const auto& m : methods) name_width = std::max(name_width, m.size() + 2);
    std::string out;
    out += "total seconds per method and dataset\n";
    out += std::string(name_width, ' ');
    for (const auto& d : dataset_names) {
        out += std::string(d.size() >= 12 ? 1 : 12 - d.size(), ' ') + d;
    }
    out += "\n";
    for (std::size_t m = 0; m < methods.size(); ++m) {
        out += methods[m] + std::string(name_width - methods[m].size(), ' ');
        for (const auto& rep : grid[m]) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%12.3f",
                          rep.fit_seconds + rep.generate_seconds);
            out += buf;
        }
        out += "\n";
    }
    out += "\nphase breakdown (fit + generate seconds)\n";
    for (std::size_t m = 0; m < methods.size(); ++m) {
        for (std::size_t d = 0; d < dataset_names.size(); ++d) {
            const auto& rep = grid[m][d];
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%-10s %-12s fit %10.3f   generate %10.3f\n",
                          methods[m].c_str(), dataset_names[d].c_str(), rep.fit_seconds,
                          rep.generate_seconds);
            out += buf;
        }
    }
    std::fputs(out.c_str(), stdout);

    if (!opts.json_out.empty()) {
        ArtifactGuard guard;
        guard.track(opts.json_out);
        nlohmann::json j;
        j["schema"] = 1;
        j["seed"] = seed;
        j["datasets"] = dataset_names;
        j["methods"] = methods;
        auto& cells = j["timings"] = nlohmann::json::object();
        for (std::size_t m = 0; m < methods.size(); ++m) {
            auto& per_method = cells[methods[m]] = nlohmann::json::object();
            for (std::size_t d = 0; d < dataset_names.size(); ++d) {
                per_method[dataset_names[d]] = grid[m][d].to_json(true);
            }
        }
        write_file(opts.json_out, j.dump(2) + "\n");
        guard.commit();
    }
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"multilabel imbalance toolkit: inspect datasets, oversample, evaluate"};
    app.require_subcommand(1);

    InspectOptions inspect;
    auto* cmd_i = app.add_subcommand("inspect", "print characterization metrics");
    cmd_i->add_option("--arff", inspect.arff, "ARFF data file");
    cmd_i->add_option("--xml", inspect.xml, "MULAN XML label header");
    cmd_i->add_option("--csv", inspect.csv_out, "also write the metrics as CSV");

    ResampleOptions resample;
    auto* cmd_r = app.add_subcommand("resample", "oversample a dataset");
    cmd_r->add_option("--arff", resample.arff, "ARFF data file");
    cmd_r->add_option("--xml", resample.xml, "MULAN XML label header");
    cmd_r->add_option("--method", resample.method,
                      "one of mldm|lpros|mlros|mlsmote|remedial")->required();
    cmd_r->add_option("--p", resample.common.p, "synthetic percentage of |D|");
    cmd_r->add_option("--k", resample.common.k, "neighbor count (mlsmote)");
    cmd_r->add_option("--seed", resample.common.seed, "root random seed");
    cmd_r->add_option("--config", resample.common.config_path, "key=value config file");
    cmd_r->add_option("--out", resample.out, "output ARFF path");
    cmd_r->add_option("--report", resample.report_out, "output JSON report path");
    cmd_r->add_option("--save-model", resample.save_model, "persist the fitted mldm model");
    cmd_r->add_option("--load-model", resample.load_model, "reuse a fitted mldm model");

    EvaluateOptions evaluate;
    auto* cmd_e = app.add_subcommand("evaluate", "cross-validated classification impact");
    cmd_e->add_option("--config", evaluate.common.config_path, "key=value config file");
    cmd_e->add_option("--methods", evaluate.methods, "resampling methods")->delimiter(',');
    cmd_e->add_option("--seed", evaluate.common.seed, "root random seed");
    cmd_e->add_option("--jobs", evaluate.common.jobs, "fold-level parallelism");
    cmd_e->add_option("--json", evaluate.json_out, "write the report as JSON");
    cmd_e->add_option("--table", evaluate.table_out, "write the aligned text table");
    cmd_e->add_option("--csv", evaluate.csv_out, "write the report as CSV");

    BenchOptions bench;
    auto* cmd_b = app.add_subcommand("bench", "time each resampler on each dataset");
    cmd_b->add_option("--config", bench.common.config_path, "key=value config file");
    cmd_b->add_option("--methods", bench.methods, "resampling methods")->delimiter(',');
    cmd_b->add_option("--seed", bench.common.seed, "root random seed");
    cmd_b->add_option("--json", bench.json_out, "write timings as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_i->parsed()) return cmd_inspect(inspect);
        if (cmd_r->parsed()) return cmd_resample(resample);
        if (cmd_e->parsed()) return cmd_evaluate(evaluate);
        if (cmd_b->parsed()) return cmd_bench(bench);
        throw ConfigError("no subcommand given");
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace mld::cli
