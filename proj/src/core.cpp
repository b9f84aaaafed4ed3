#include "fpdetect/core.hpp"

#include <algorithm>
#include <unordered_map>

namespace fpdetect {

void validate_features(const Fingerprint& fp) {
    for (double v : fp.features) {
        if (!std::isfinite(v))
            throw std::invalid_argument("fingerprint feature is not finite");
    }
}

TimeFrame TimeFrame::stripped() const {
    TimeFrame out;
    out.frame_index = frame_index;
    out.fingerprints.reserve(fingerprints.size());
    for (const auto& fp : fingerprints)
        out.fingerprints.push_back({fp.features, fp.claimed_id, std::nullopt});
    return out;
}

void TimeFrame::validate() const {
    if (fingerprints.empty()) throw std::invalid_argument("time frame is empty");
    const std::size_t d = fingerprints.front().dim();
    for (const auto& fp : fingerprints) {
        if (fp.dim() != d)
            throw std::invalid_argument("fingerprint dimension mismatch within frame");
        validate_features(fp);
    }
}

namespace {

std::vector<int> distinct_sorted(const std::vector<int>& labels) {
    std::vector<int> space(labels);
    std::sort(space.begin(), space.end());
    space.erase(std::unique(space.begin(), space.end()), space.end());
    return space;
}

}  // namespace

Labeling Labeling::from_labels(std::vector<int> labels) {
    Labeling out;
    out.label_space = distinct_sorted(labels);
    out.labels = std::move(labels);
    return out;
}

Labeling Labeling::from_labels(std::vector<int> labels, std::vector<double> confidences) {
    if (labels.size() != confidences.size())
        throw std::invalid_argument("labels/confidences length mismatch");
    for (double c : confidences)
        if (!(c >= 0.0 && c <= 1.0))
            throw std::invalid_argument("confidence outside [0,1]");
    Labeling out = from_labels(std::move(labels));
    out.confidences = std::move(confidences);
    return out;
}

Labeling compact_labels(const Labeling& in) {
    std::unordered_map<int, int> remap;
    remap.reserve(in.label_space.size());
    std::vector<int> labels(in.labels.size());
    int next = 0;
    for (std::size_t i = 0; i < in.labels.size(); ++i) {
        auto [it, inserted] = remap.emplace(in.labels[i], next);
        if (inserted) ++next;
        labels[i] = it->second;
    }
    Labeling out = Labeling::from_labels(std::move(labels));
    out.confidences = in.confidences;
    return out;
}

const char* to_string(DistanceMetric m) {
    switch (m) {
        case DistanceMetric::Euclidean: return "euclidean";
        case DistanceMetric::SquaredEuclidean: return "squared-euclidean";
    }
    return "euclidean";
}

DistanceMetric distance_metric_from_string(const std::string& name) {
    if (name == "euclidean") return DistanceMetric::Euclidean;
    if (name == "squared-euclidean") return DistanceMetric::SquaredEuclidean;
    throw std::invalid_argument("unknown distance metric: " + name);
}

double distance(std::span<const double> a, std::span<const double> b, DistanceMetric metric) {
    if (a.size() != b.size())
        throw std::invalid_argument("distance: dimension mismatch");
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sq += d * d;
    }
    return metric == DistanceMetric::SquaredEuclidean ? sq : std::sqrt(sq);
}

}  // namespace fpdetect
