// Abstract knowledge database: weighted labeled fingerprints carried across
// time frames, with similarity merging, logistic confidence, decay and prune.
#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fpdetect/core.hpp"

namespace fpdetect::akd {

struct AkdParams {
    double epsilon = 1.0;  // distance threshold for "similar"
    double b = 1.0;        // logistic parameters, confidence = 1/(1 + b e^{-c w})
    double c = 1.0;
    double w_init = 0.0;
    double w_step_inc = 2.0;
    double w_step_dec = 2.0;
    double w_prune = -3.0;
    double decay_amount = 1.0;
    DistanceMetric metric = DistanceMetric::Euclidean;

    void validate() const;
};

struct AkdEntry {
    Fingerprint fingerprint;  // truth_id is never stored
    int label = 0;
    double weight = 0.0;
};

// Label suggestion for one input fingerprint. `entry` is the index of the
// matched database entry, used by the update step.
struct Suggestion {
    std::optional<int> label;
    double confidence = 0.0;
    bool matched = false;
    std::optional<std::size_t> entry;
};

class Akd {
public:
    Akd() = default;
    explicit Akd(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<AkdEntry>& entries() const { return entries_; }
    std::vector<AkdEntry>& mutable_entries() { return entries_; }

    // Dimension-checked insert; drops any truth_id on the way in.
    void insert(AkdEntry entry);

    // Smallest nonnegative label not currently in use.
    int next_label() const;

    std::string to_snapshot_json(const AkdParams& params) const;
    static std::pair<Akd, AkdParams> from_snapshot_json(const std::string& text);
    void save_snapshot(const std::filesystem::path& path, const AkdParams& params) const;
    static std::pair<Akd, AkdParams> load_snapshot(const std::filesystem::path& path);

private:
    std::vector<AkdEntry> entries_;
    std::size_t dim_ = 0;  // 0 until the first entry fixes it
};

// Logistic confidence of a weight; strictly increasing in w.
double confidence(double w, const AkdParams& params);

// Collapses same-label groups of mutually similar entries onto their
// centroid, keeping the group's maximum weight. Greedy by running centroid
// within each label, repeated until no group merges, so the result is stable
// under a second pass.
void merge_similar(Akd& db, const AkdParams& params);

// Nearest-entry lookup per input fingerprint; a match requires distance
// <= epsilon. Ties break toward larger weight, then earlier insertion.
std::vector<Suggestion> suggest_labels(const Akd& db, const TimeFrame& frame,
                                       const AkdParams& params);

void decay_weights(Akd& db, const AkdParams& params);

// Retains exactly the entries with weight >= w_prune.
void prune(Akd& db, const AkdParams& params);

}  // namespace fpdetect::akd
