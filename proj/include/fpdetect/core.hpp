// Shared domain types: fingerprints, time frames, labelings, distances.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fpdetect {

// One observation: numeric feature vector plus the device ID it claims.
// truth_id exists only in simulation and must never reach the detector.
struct Fingerprint {
    std::vector<double> features;
    std::string claimed_id;
    std::optional<std::string> truth_id;

    std::size_t dim() const { return features.size(); }
};

// Throws if any feature component is NaN or infinite.
void validate_features(const Fingerprint& fp);

// The batch of fingerprints arriving in one detection round.
struct TimeFrame {
    std::vector<Fingerprint> fingerprints;
    int frame_index = 0;

    std::size_t size() const { return fingerprints.size(); }
    bool empty() const { return fingerprints.empty(); }
    std::size_t dim() const { return fingerprints.empty() ? 0 : fingerprints.front().dim(); }

    // Copy with truth_id removed; the clustering path only ever sees this.
    TimeFrame stripped() const;

    // Non-empty, uniform dimension, finite features. Throws on violation.
    void validate() const;
};

// Cluster assignment for every fingerprint of a frame.
struct Labeling {
    std::vector<int> labels;
    std::optional<std::vector<double>> confidences;
    std::vector<int> label_space;  // distinct labels, ascending

    std::size_t size() const { return labels.size(); }

    static Labeling from_labels(std::vector<int> labels);
    static Labeling from_labels(std::vector<int> labels, std::vector<double> confidences);
};

// Relabel to 0..K-1 in order of first appearance.
Labeling compact_labels(const Labeling& in);

enum class DistanceMetric { Euclidean, SquaredEuclidean };

const char* to_string(DistanceMetric m);
DistanceMetric distance_metric_from_string(const std::string& name);

double distance(std::span<const double> a, std::span<const double> b, DistanceMetric metric);

inline double distance(const Fingerprint& a, const Fingerprint& b, DistanceMetric metric) {
    return distance(a.features, b.features, metric);
}

}  // namespace fpdetect
