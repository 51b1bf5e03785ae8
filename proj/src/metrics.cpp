#include "mld/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mld/error.hpp"

namespace mld {

bool ImbalanceProfile::is_minority(std::size_t label) const {
    return std::find(minority_labels.begin(), minority_labels.end(), label) !=
           minority_labels.end();
}

ImbalanceProfile compute_profile(const MultilabelDataset& ds) {
    if (ds.size() == 0) throw Error("cannot profile an empty dataset");
    const std::size_t n = ds.size();
    const std::size_t nl = ds.label_count();

    ImbalanceProfile p;
    p.label_counts.assign(nl, 0);
    std::size_t active_total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& set = ds.labelset(i);
        for (std::size_t l = 0; l < nl; ++l) {
            if (set[l]) {
                ++p.label_counts[l];
                ++active_total;
            }
        }
    }
    p.card = static_cast<double>(active_total) / static_cast<double>(n);
    p.dens = p.card / static_cast<double>(nl);

    const std::size_t max_count = *std::max_element(p.label_counts.begin(), p.label_counts.end());
    if (max_count == 0) throw Error("every label has zero count; IRlbl is undefined");

    p.irlbl.assign(nl, std::numeric_limits<double>::quiet_NaN());
    double ir_sum = 0.0;
    std::size_t ir_n = 0;
    for (std::size_t l = 0; l < nl; ++l) {
        if (p.label_counts[l] == 0) continue;
        p.irlbl[l] = static_cast<double>(max_count) / static_cast<double>(p.label_counts[l]);
        ir_sum += p.irlbl[l];
        ++ir_n;
    }
    p.mean_ir = ir_sum / static_cast<double>(ir_n);

    for (std::size_t l = 0; l < nl; ++l) {
        if (p.label_counts[l] > 0 && p.irlbl[l] > p.mean_ir) p.minority_labels.push_back(l);
    }

    p.scumble_per_instance.assign(n, 0.0);
    double scumble_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& set = ds.labelset(i);
        double log_sum = 0.0;
        double lin_sum = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        std::size_t active = 0;
        for (std::size_t l = 0; l < nl; ++l) {
            if (!set[l]) continue;
            const double ir = p.irlbl[l];
            log_sum += std::log(ir);
            lin_sum += ir;
            lo = std::min(lo, ir);
            hi = std::max(hi, ir);
            ++active;
        }
        if (active == 0 || lo == hi) continue;  // equal ratios give exactly 0
        const double geo = std::exp(log_sum / static_cast<double>(active));
        const double ari = lin_sum / static_cast<double>(active);
        p.scumble_per_instance[i] = 1.0 - geo / ari;
        scumble_sum += p.scumble_per_instance[i];
    }
    p.scumble = scumble_sum / static_cast<double>(n);
    return p;
}

double cardinality(const MultilabelDataset& ds) { return compute_profile(ds).card; }

double density(const MultilabelDataset& ds) { return compute_profile(ds).dens; }

double irlbl(const MultilabelDataset& ds, std::size_t label) {
    const auto profile = compute_profile(ds);
    if (label >= ds.label_count()) throw Error("label index out of range");
    if (profile.label_counts[label] == 0) {
        throw Error("IRlbl is undefined for zero-count label '" + ds.labels()[label] + "'");
    }
    return profile.irlbl[label];
}

double mean_ir(const MultilabelDataset& ds) { return compute_profile(ds).mean_ir; }

std::pair<double, std::vector<double>> scumble(const MultilabelDataset& ds) {
    auto profile = compute_profile(ds);
    return {profile.scumble, std::move(profile.scumble_per_instance)};
}

std::vector<std::size_t> minority_labels(const MultilabelDataset& ds) {
    return compute_profile(ds).minority_labels;
}

double meanir_improvement(double before, double after) {
    if (!(before > 0.0)) {
        throw Error("meanir_improvement requires a positive 'before' value");
    }
    return 100.0 * (before - after) / before;
}

}  // namespace mld
