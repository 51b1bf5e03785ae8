#include "mld/codec.hpp"

#include <algorithm>
#include <cmath>

#include "mld/error.hpp"
#include "mld/normal.hpp"

namespace mld {

namespace {

// Midpoint empirical CDF over deduplicated sorted references: reference i of n
// sits at u = (i + 0.5) / n, so every in-sample value already lies inside the
// clipping band [delta, 1 - delta] with delta = 1 / (2n).
double ecdf_u(const std::vector<double>& refs, double v) {
    const double n = static_cast<double>(refs.size());
    const double delta = 1.0 / (2.0 * n);
    if (v <= refs.front()) return delta;
    if (v >= refs.back()) return 1.0 - delta;
    const auto it = std::upper_bound(refs.begin(), refs.end(), v);
    const std::size_t hi = static_cast<std::size_t>(it - refs.begin());
    const std::size_t lo = hi - 1;
    const double u_lo = (static_cast<double>(lo) + 0.5) / n;
    const double u_hi = (static_cast<double>(hi) + 0.5) / n;
    const double t = (v - refs[lo]) / (refs[hi] - refs[lo]);
    return u_lo + t * (u_hi - u_lo);
}

double ecdf_inverse(const std::vector<double>& refs, double u) {
    const double n = static_cast<double>(refs.size());
    const double u_min = 0.5 / n;
    const double u_max = (n - 0.5) / n;
    if (u <= u_min) return refs.front();
    if (u >= u_max) return refs.back();
    const double pos = u * n - 0.5;  // fractional reference index
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, refs.size() - 1);
    const double t = pos - static_cast<double>(lo);
    return refs[lo] + t * (refs[hi] - refs[lo]);
}

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

}  // namespace

ColumnCodec ColumnCodec::fit(const MultilabelDataset& ds) {
    if (ds.size() == 0) throw Error("cannot fit a codec on an empty dataset");

    ColumnCodec codec;
    codec.columns_ = ds.columns();
    codec.labels_ = ds.labels();

    std::size_t offset = 0;
    for (std::size_t c = 0; c < ds.feature_count(); ++c) {
        const auto& col = ds.columns()[c];
        if (col.numeric()) {
            std::vector<double> refs;
            refs.reserve(ds.size());
            for (std::size_t i = 0; i < ds.size(); ++i) refs.push_back(ds.value(i, c));
            std::sort(refs.begin(), refs.end());
            refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
            codec.entries_.push_back({CodecEntry::Kind::Numeric, c, offset, 1});
            codec.refs_.push_back(std::move(refs));
            offset += 1;
        } else {
            const std::size_t k = col.categories.size();
            codec.entries_.push_back({CodecEntry::Kind::Nominal, c, offset, k});
            codec.refs_.emplace_back();
            offset += k;
        }
    }
    for (std::size_t l = 0; l < ds.label_count(); ++l) {
        codec.entries_.push_back({CodecEntry::Kind::Label, l, offset, 2});
        codec.refs_.emplace_back();
        offset += 2;
    }
    codec.width_ = offset;
    return codec;
}

std::size_t ColumnCodec::label_offset(std::size_t l) const {
    for (const auto& e : entries_) {
        if (e.kind == CodecEntry::Kind::Label && e.source == l) return e.offset;
    }
    throw Error("label index out of range");
}

std::vector<double> ColumnCodec::encode_row(const std::vector<double>& features,
                                            const std::vector<std::uint8_t>& labelset) const {
    if (features.size() != columns_.size() || labelset.size() != labels_.size()) {
        throw SchemaError("row does not match the codec schema");
    }
    std::vector<double> out(width_, 0.0);
    for (std::size_t e = 0; e < entries_.size(); ++e) {
        const auto& entry = entries_[e];
        switch (entry.kind) {
            case CodecEntry::Kind::Numeric:
                out[entry.offset] = normal_quantile(ecdf_u(refs_[e], features[entry.source]));
                break;
            case CodecEntry::Kind::Nominal: {
                const auto idx = static_cast<std::size_t>(features[entry.source]);
                if (idx >= entry.width) throw SchemaError("nominal index out of range");
                out[entry.offset + idx] = 1.0;
                break;
            }
            case CodecEntry::Kind::Label:
                out[entry.offset + (labelset[entry.source] ? 1 : 0)] = 1.0;
                break;
        }
    }
    return out;
}

std::vector<std::vector<double>> ColumnCodec::encode_dataset(const MultilabelDataset& ds) const {
    std::vector<std::vector<double>> out;
    out.reserve(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out.push_back(encode_row(ds.row(i), ds.labelset(i)));
    }
    return out;
}

std::pair<std::vector<double>, std::vector<std::uint8_t>> ColumnCodec::decode(
    std::span<const double> encoded) const {
    if (encoded.size() != width_) {
        throw SchemaError("encoded vector width " + std::to_string(encoded.size()) +
                          " does not match codec width " + std::to_string(width_));
    }
    std::vector<double> features(columns_.size(), 0.0);
    std::vector<std::uint8_t> labelset(labels_.size(), 0);
    for (std::size_t e = 0; e < entries_.size(); ++e) {
        const auto& entry = entries_[e];
        switch (entry.kind) {
            case CodecEntry::Kind::Numeric:
                features[entry.source] =
                    ecdf_inverse(refs_[e], normal_cdf(encoded[entry.offset]));
                break;
            case CodecEntry::Kind::Nominal: {
                std::size_t best = 0;
                for (std::size_t i = 1; i < entry.width; ++i) {
                    if (encoded[entry.offset + i] > encoded[entry.offset + best]) best = i;
                }
                features[entry.source] = static_cast<double>(best);
                break;
            }
            case CodecEntry::Kind::Label:
                labelset[entry.source] =
                    encoded[entry.offset + 1] > encoded[entry.offset] ? 1 : 0;
                break;
        }
    }
    return {std::move(features), std::move(labelset)};
}

nlohmann::json ColumnCodec::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["width"] = width_;
    j["labels"] = labels_;
    auto& cols = j["columns"] = nlohmann::json::array();
    for (const auto& col : columns_) {
        cols.push_back({{"name", col.name}, {"categories", col.categories}});
    }
    auto& entries = j["entries"] = nlohmann::json::array();
    for (std::size_t e = 0; e < entries_.size(); ++e) {
        entries.push_back({{"kind", static_cast<int>(entries_[e].kind)},
                           {"source", entries_[e].source},
                           {"offset", entries_[e].offset},
                           {"width", entries_[e].width},
                           {"refs", refs_[e]}});
    }
    return j;
}

ColumnCodec ColumnCodec::from_json(const nlohmann::json& j) {
    if (!j.contains("version") || j.at("version").get<int>() != 1) {
        throw SchemaError("unsupported codec version");
    }
    ColumnCodec codec;
    codec.width_ = j.at("width").get<std::size_t>();
    codec.labels_ = j.at("labels").get<std::vector<std::string>>();
    for (const auto& col : j.at("columns")) {
        codec.columns_.push_back({col.at("name").get<std::string>(),
                                  col.at("categories").get<std::vector<std::string>>()});
    }
    for (const auto& entry : j.at("entries")) {
        codec.entries_.push_back({static_cast<CodecEntry::Kind>(entry.at("kind").get<int>()),
                                  entry.at("source").get<std::size_t>(),
                                  entry.at("offset").get<std::size_t>(),
                                  entry.at("width").get<std::size_t>()});
        codec.refs_.push_back(entry.at("refs").get<std::vector<double>>());
    }
    return codec;
}

std::uint64_t ColumnCodec::hash() const {
    const std::string dump = to_json().dump();
    std::uint64_t h = kFnvOffset;
    for (unsigned char c : dump) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

}  // namespace mld
