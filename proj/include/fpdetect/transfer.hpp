// Label-space alignment between labelings, the decision block that merges
// Bayesian output with AKD suggestions, and the AKD update step.
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fpdetect/akd.hpp"
#include "fpdetect/core.hpp"

namespace fpdetect::transfer {

// Injective map from a source label space into a target label space.
// Sources without an image (possible only when the source space is larger)
// carry nullopt. cost counts participating fingerprints whose mapped label
// disagrees with the target label.
struct LabelMapping {
    std::vector<int> source_labels;          // ascending
    std::vector<std::optional<int>> image;   // parallel to source_labels
    int cost = 0;

    std::optional<int> apply(int source_label) const;
};

// Exact minimum-disagreement alignment (Hungarian on the agreement matrix).
// Ties between optimal mappings break toward the lexicographically smallest
// mapping vector, unmapped ordering after every real label.
LabelMapping map_labels(const Labeling& source, const Labeling& target);

// Same, but fingerprints participate only where `target` carries a label.
LabelMapping map_labels_masked(std::span<const int> source,
                               std::span<const std::optional<int>> target);

// Alignment of a labeling onto the label space of AKD suggestions; only
// matched fingerprints contribute agreement counts.
LabelMapping map_labels_to_suggestions(const Labeling& source,
                                       std::span<const akd::Suggestion> suggestions);

struct DecisionPolicy {
    double tau = 0.5;  // confidence needed to prefer an AKD suggestion

    void validate() const;
};

// Final decision per fingerprint: a matched suggestion with confidence >=
// tau wins, otherwise the (aligned) Bayesian label. With no matches at all
// the Bayesian labeling is returned unchanged.
Labeling merge_decisions(const Labeling& bayes, std::span<const akd::Suggestion> suggestions,
                         const DecisionPolicy& policy);

// Algorithm-2 style update: reinforce agreeing matched entries, penalize
// disagreeing ones (adding the input under its mapped label), add unmatched
// inputs as new knowledge, then decay, prune and merge.
void update_akd(akd::Akd& db, const TimeFrame& frame, const Labeling& final_labels,
                std::span<const akd::Suggestion> suggestions, const akd::AkdParams& params);

// Exposed for tests: lexicographically-smallest optimal assignment of an
// n x n integer gain matrix (maximizing total gain). Returns row -> column.
std::vector<int> solve_max_assignment(const std::vector<std::vector<long long>>& gain);

}  // namespace fpdetect::transfer
