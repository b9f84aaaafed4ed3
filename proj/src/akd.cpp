#include "fpdetect/akd.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

namespace fpdetect::akd {

namespace {
using nlohmann::json;
constexpr int kSnapshotVersion = 1;
}  // namespace

void AkdParams::validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("akd: epsilon must be positive");
    if (!(b > 0.0) || !(c > 0.0)) throw std::invalid_argument("akd: b and c must be positive");
    if (!(w_prune < w_init)) throw std::invalid_argument("akd: w_prune must be below w_init");
    if (!(w_step_inc > 0.0) || !(w_step_dec > 0.0) || !(decay_amount > 0.0))
        throw std::invalid_argument("akd: weight steps must be positive");
    if (!std::isfinite(w_init)) throw std::invalid_argument("akd: w_init must be finite");
}

void Akd::insert(AkdEntry entry) {
    validate_features(entry.fingerprint);
    entry.fingerprint.truth_id.reset();
    if (dim_ == 0) dim_ = entry.fingerprint.dim();
    if (entry.fingerprint.dim() != dim_)
        throw std::invalid_argument("akd: entry dimension mismatch");
    entries_.push_back(std::move(entry));
}

int Akd::next_label() const {
    int next = 0;
    for (const auto& e : entries_) next = std::max(next, e.label + 1);
    return next;
}

double confidence(double w, const AkdParams& params) {
    return 1.0 / (1.0 + params.b * std::exp(-params.c * w));
}

namespace {

// One greedy pass over the entries of a single label, in insertion order.
// Opens a group at the first ungrouped entry and absorbs every later
// ungrouped entry within epsilon of the group's running centroid. Returns
// true when any group of size >= 2 was collapsed.
bool merge_pass(std::vector<AkdEntry>& entries, const AkdParams& params) {
    std::vector<int> labels;
    for (const auto& e : entries) labels.push_back(e.label);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

    bool merged_any = false;
    std::vector<AkdEntry> out;
    out.reserve(entries.size());
    std::vector<char> grouped(entries.size(), 0);

    for (int label : labels) {
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (grouped[i] || entries[i].label != label) continue;
            grouped[i] = 1;
            std::vector<std::size_t> members{i};
            std::vector<double> centroid = entries[i].fingerprint.features;
            for (std::size_t j = i + 1; j < entries.size(); ++j) {
                if (grouped[j] || entries[j].label != label) continue;
                if (distance(centroid, entries[j].fingerprint.features, params.metric) <=
                    params.epsilon) {
                    grouped[j] = 1;
                    members.push_back(j);
                    const double m = double(members.size());
                    for (std::size_t k = 0; k < centroid.size(); ++k)
                        centroid[k] += (entries[j].fingerprint.features[k] - centroid[k]) / m;
                }
            }
            if (members.size() == 1) {
                out.push_back(entries[i]);
                continue;
            }
            merged_any = true;
            // exact centroid, summed fresh to avoid drift of the running mean
            std::vector<double> mean(centroid.size(), 0.0);
            double w_max = entries[members.front()].weight;
            for (std::size_t m : members) {
                w_max = std::max(w_max, entries[m].weight);
                for (std::size_t k = 0; k < mean.size(); ++k)
                    mean[k] += entries[m].fingerprint.features[k];
            }
            for (auto& v : mean) v /= double(members.size());
            AkdEntry merged;
            merged.fingerprint.features = std::move(mean);
            merged.fingerprint.claimed_id = entries[members.front()].fingerprint.claimed_id;
            merged.label = label;
            merged.weight = w_max;
            out.push_back(std::move(merged));
        }
    }
    entries = std::move(out);
    return merged_any;
}

}  // namespace

void merge_similar(Akd& db, const AkdParams& params) {
    params.validate();
    // iterate to a fixpoint: a merged centroid can land within epsilon of a
    // neighbor its members were not close to
    while (merge_pass(db.mutable_entries(), params)) {
    }
}

std::vector<Suggestion> suggest_labels(const Akd& db, const TimeFrame& frame,
                                       const AkdParams& params) {
    params.validate();
    frame.validate();
    if (!db.empty() && frame.dim() != db.dim())
        throw std::invalid_argument("suggest_labels: frame/AKD dimension mismatch");

    std::vector<Suggestion> out(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) {
        const auto& x = frame.fingerprints[i];
        std::optional<std::size_t> best;
        double best_dist = 0.0;
        for (std::size_t e = 0; e < db.entries().size(); ++e) {
            const double d = distance(x.features, db.entries()[e].fingerprint.features,
                                      params.metric);
            if (!best || d < best_dist ||
                (d == best_dist && db.entries()[e].weight > db.entries()[*best].weight)) {
                best = e;
                best_dist = d;
            }
        }
        if (best && best_dist <= params.epsilon) {
            const auto& entry = db.entries()[*best];
            out[i] = Suggestion{entry.label, confidence(entry.weight, params), true, best};
        }
    }
    return out;
}

void decay_weights(Akd& db, const AkdParams& params) {
    for (auto& e : db.mutable_entries()) e.weight -= params.decay_amount;
}

void prune(Akd& db, const AkdParams& params) {
    auto& entries = db.mutable_entries();
    std::erase_if(entries, [&](const AkdEntry& e) { return e.weight < params.w_prune; });
}

std::string Akd::to_snapshot_json(const AkdParams& params) const {
    json doc;
    doc["version"] = kSnapshotVersion;
    doc["d"] = dim_;
    doc["params"] = {{"epsilon", params.epsilon},
                     {"b", params.b},
                     {"c", params.c},
                     {"w_init", params.w_init},
                     {"w_step_inc", params.w_step_inc},
                     {"w_step_dec", params.w_step_dec},
                     {"w_prune", params.w_prune},
                     {"decay_amount", params.decay_amount},
                     {"metric", to_string(params.metric)}};
    json entries = json::array();
    for (const auto& e : entries_) {
        entries.push_back({{"features", e.fingerprint.features},
                           {"claimed_id", e.fingerprint.claimed_id},
                           {"label", e.label},
                           {"weight", e.weight}});
    }
    doc["entries"] = std::move(entries);
    return doc.dump(2);
}

std::pair<Akd, AkdParams> Akd::from_snapshot_json(const std::string& text) {
    json doc = json::parse(text);
    if (!doc.contains("version") || doc.at("version").get<int>() != kSnapshotVersion)
        throw std::runtime_error("akd snapshot: unsupported version");
    const auto d = doc.at("d").get<std::size_t>();

    AkdParams params;
    const auto& p = doc.at("params");
    params.epsilon = p.at("epsilon").get<double>();
    params.b = p.at("b").get<double>();
    params.c = p.at("c").get<double>();
    params.w_init = p.at("w_init").get<double>();
    params.w_step_inc = p.at("w_step_inc").get<double>();
    params.w_step_dec = p.at("w_step_dec").get<double>();
    params.w_prune = p.at("w_prune").get<double>();
    params.decay_amount = p.at("decay_amount").get<double>();
    params.metric = distance_metric_from_string(p.at("metric").get<std::string>());

    Akd db(d);
    for (const auto& je : doc.at("entries")) {
        AkdEntry e;
        for (const auto& v : je.at("features")) e.fingerprint.features.push_back(v.get<double>());
        if (e.fingerprint.dim() != d)
            throw std::runtime_error("akd snapshot: entry dimension mismatch");
        e.fingerprint.claimed_id = je.at("claimed_id").get<std::string>();
        e.label = je.at("label").get<int>();
        e.weight = je.at("weight").get<double>();
        db.insert(std::move(e));
    }
    return {std::move(db), params};
}

void Akd::save_snapshot(const std::filesystem::path& path, const AkdParams& params) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << to_snapshot_json(params) << '\n';
}

std::pair<Akd, AkdParams> Akd::load_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_snapshot_json(text);
}

}  // namespace fpdetect::akd
