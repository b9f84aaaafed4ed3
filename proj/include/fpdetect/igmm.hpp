// Infinite Gaussian mixture model clustered by collapsed Gibbs sampling.
// Component means and variances carry an independent Normal-Inverse-Chi-
// squared prior per feature dimension, so the posterior predictive of a
// cluster is a product of univariate Student-t densities and both parameters
// stay integrated out of the chain.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fpdetect/core.hpp"
#include "fpdetect/rng.hpp"

namespace fpdetect::igmm {

// Prior spec as configured; mean and variance scale may be left empty to be
// filled from the frame (empirical mean / per-dimension variance).
struct Hyperparameters {
    std::optional<std::vector<double>> mu0;
    std::vector<double> kappa0{1.0};  // scalar broadcast or one per dimension
    double nu0 = 1.0;
    std::optional<std::vector<double>> sigma0_sq;
    double alpha = 1.0;
};

// Fully specified prior, one entry per dimension.
struct ResolvedHyper {
    std::vector<double> mu0;
    std::vector<double> kappa0;
    std::vector<double> sigma0_sq;
    double nu0 = 1.0;
    double alpha = 1.0;

    std::size_t dim() const { return mu0.size(); }
};

// Validates positivity constraints and fills data-driven defaults.
ResolvedHyper resolve(const Hyperparameters& hp, const TimeFrame& frame);

// Running sufficient statistics of one cluster.
struct ClusterStats {
    std::size_t count = 0;
    std::vector<double> sum;
    std::vector<double> sum_sq;

    explicit ClusterStats(std::size_t dim) : sum(dim, 0.0), sum_sq(dim, 0.0) {}
    ClusterStats() = default;

    void add(std::span<const double> x);
    void remove(std::span<const double> x);
    std::size_t dim() const { return sum.size(); }
};

enum class InitMode { AllInOneCluster, OneClusterEach, RandomK };

struct GibbsConfig {
    int max_iterations = 50;  // full sweeps
    InitMode init_mode = InitMode::AllInOneCluster;
    int random_k = 2;  // cluster count for InitMode::RandomK
};

const char* to_string(InitMode m);
InitMode init_mode_from_string(const std::string& name);

// log B(alpha) = sum lgamma(alpha_i) - lgamma(sum alpha_i).
double log_beta_function(std::span<const double> alphas);
double beta_function(std::span<const double> alphas);

// Dirichlet density at a point of the simplex.
double dirichlet_density(std::span<const double> weights, std::span<const double> alphas);

// Log posterior predictive density of x under the cluster's members; the
// empty cluster gives the prior predictive.
double posterior_predictive_logdensity(const ClusterStats& stats, std::span<const double> x,
                                       const ResolvedHyper& hp);

// Assignment probabilities for a held-out point: existing cluster k gets
// weight n_k * predictive_k(x), a new cluster gets alpha * prior(x). The
// point must already be removed from `clusters`. `n_total` is the frame
// size including the held-out point. Normalized via log-sum-exp; the final
// entry is the new-cluster probability.
std::vector<double> crp_assignment_probs(std::span<const double> x, std::size_t n_total,
                                         std::span<const ClusterStats> clusters,
                                         const ResolvedHyper& hp);

// One Gibbs chain over a frame. Exposed as a class so tests can observe the
// partition sweep by sweep; gibbs_cluster below is the plain entry point.
class GibbsSampler {
public:
    GibbsSampler(const TimeFrame& frame, ResolvedHyper hp, GibbsConfig cfg, std::uint64_t seed);

    void sweep();                  // one full pass over the frame
    void run();                    // cfg.max_iterations sweeps
    Labeling labeling() const;     // current partition, labels compacted to 0..K-1
    std::size_t num_clusters() const { return clusters_.size(); }

private:
    struct ClusterCache {
        std::vector<double> mu;          // posterior predictive location, per dim
        std::vector<double> inv_lambda;  // 1 / scale^2, per dim
        double log_const = 0.0;          // sum of per-dim terms independent of x
        double inv_nu = 0.0;
        double half_nu_plus_1 = 0.0;
    };

    void init_assignments();
    void insert_point(std::size_t i, std::size_t cluster);
    void remove_point(std::size_t i);
    void refresh_cache(std::size_t cluster);
    void refresh_into(ClusterCache& c, const ClusterStats& stats);
    double count_constant(std::size_t n);
    double predictive_logdensity(const ClusterCache& c, std::span<const double> x) const;

    const TimeFrame& frame_;
    ResolvedHyper hp_;
    GibbsConfig cfg_;
    Rng rng_;
    std::vector<int> assignment_;          // fingerprint -> index into clusters_
    std::vector<ClusterStats> clusters_;
    std::vector<ClusterCache> caches_;
    ClusterCache prior_cache_;
    std::vector<double> lgamma_by_count_;  // lgamma((nu+1)/2)-lgamma(nu/2)-0.5*log(nu) by n
    std::vector<double> probs_;            // scratch
};

// Runs the sampler and returns the final sweep's labeling. Deterministic
// given the seed.
Labeling gibbs_cluster(const TimeFrame& frame, const Hyperparameters& hp, const GibbsConfig& cfg,
                       std::uint64_t seed);
Labeling gibbs_cluster(const TimeFrame& frame, const ResolvedHyper& hp, const GibbsConfig& cfg,
                       std::uint64_t seed);

}  // namespace fpdetect::igmm
