#include "fpdetect/igmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fpdetect::igmm {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> broadcast(const std::vector<double>& v, std::size_t d, const char* name) {
    if (v.size() == d) return v;
    if (v.size() == 1) return std::vector<double>(d, v[0]);
    throw std::invalid_argument(std::string(name) + ": expected 1 or d entries");
}

// Normalizes log weights in place into probabilities via log-sum-exp.
void normalize_log_weights(std::vector<double>& w) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : w) mx = std::max(mx, v);
    double total = 0.0;
    for (double& v : w) total += (v = std::exp(v - mx));
    for (double& v : w) v /= total;
}

// Student-t log density with location/scale, written out from lgamma. This
// is the slow reference path; the sampler keeps cached per-cluster constants.
double log_student_t(double x, double nu, double loc, double scale_sq) {
    const double t_sq = (x - loc) * (x - loc) / scale_sq;
    return std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
           0.5 * std::log(nu * kPi * scale_sq) - (nu + 1.0) / 2.0 * std::log1p(t_sq / nu);
}

// Posterior NIX parameters for one dimension.
struct PosteriorDim {
    double mu_n, kappa_n, nu_n, nu_sigma_sq_n;
};

PosteriorDim posterior_dim(const ClusterStats& stats, std::size_t j, const ResolvedHyper& hp) {
    const double n = double(stats.count);
    const double kappa0 = hp.kappa0[j];
    const double mu0 = hp.mu0[j];
    PosteriorDim p;
    p.kappa_n = kappa0 + n;
    p.nu_n = hp.nu0 + n;
    if (stats.count == 0) {
        p.mu_n = mu0;
        p.nu_sigma_sq_n = hp.nu0 * hp.sigma0_sq[j];
        return p;
    }
    const double mean = stats.sum[j] / n;
    double ss = stats.sum_sq[j] - n * mean * mean;
    if (ss < 0.0) ss = 0.0;
    p.mu_n = (kappa0 * mu0 + n * mean) / p.kappa_n;
    p.nu_sigma_sq_n =
        hp.nu0 * hp.sigma0_sq[j] + ss + (kappa0 * n / p.kappa_n) * (mean - mu0) * (mean - mu0);
    return p;
}

}  // namespace

ResolvedHyper resolve(const Hyperparameters& hp, const TimeFrame& frame) {
    frame.validate();
    const std::size_t d = frame.dim();
    const double n = double(frame.size());

    ResolvedHyper out;
    out.nu0 = hp.nu0;
    out.alpha = hp.alpha;
    out.kappa0 = broadcast(hp.kappa0, d, "kappa0");

    if (hp.mu0) {
        out.mu0 = broadcast(*hp.mu0, d, "mu0");
    } else {
        out.mu0.assign(d, 0.0);
        for (const auto& fp : frame.fingerprints)
            for (std::size_t j = 0; j < d; ++j) out.mu0[j] += fp.features[j];
        for (auto& v : out.mu0) v /= n;
    }

    if (hp.sigma0_sq) {
        out.sigma0_sq = broadcast(*hp.sigma0_sq, d, "sigma0_sq");
    } else {
        out.sigma0_sq.assign(d, 0.0);
        for (const auto& fp : frame.fingerprints)
            for (std::size_t j = 0; j < d; ++j) {
                const double c = fp.features[j] - out.mu0[j];
                out.sigma0_sq[j] += c * c;
            }
        for (auto& v : out.sigma0_sq) {
            v /= n;
            if (v <= 0.0) v = 1.0;  // degenerate frame (e.g. a single point)
        }
    }

    for (double v : out.kappa0)
        if (!(v > 0.0)) throw std::invalid_argument("kappa0 must be positive");
    if (!(out.nu0 > 0.0)) throw std::invalid_argument("nu0 must be positive");
    for (double v : out.sigma0_sq)
        if (!(v > 0.0)) throw std::invalid_argument("sigma0_sq must be positive");
    if (!(out.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    return out;
}

void ClusterStats::add(std::span<const double> x) {
    if (x.size() != sum.size()) throw std::invalid_argument("ClusterStats::add: dimension mismatch");
    ++count;
    for (std::size_t j = 0; j < x.size(); ++j) {
        sum[j] += x[j];
        sum_sq[j] += x[j] * x[j];
    }
}

void ClusterStats::remove(std::span<const double> x) {
    if (x.size() != sum.size())
        throw std::invalid_argument("ClusterStats::remove: dimension mismatch");
    if (count == 0) throw std::logic_error("ClusterStats::remove on empty cluster");
    --count;
    for (std::size_t j = 0; j < x.size(); ++j) {
        sum[j] -= x[j];
        sum_sq[j] -= x[j] * x[j];
    }
    if (count == 0) {
        std::fill(sum.begin(), sum.end(), 0.0);
        std::fill(sum_sq.begin(), sum_sq.end(), 0.0);
    }
}

const char* to_string(InitMode m) {
    switch (m) {
        case InitMode::AllInOneCluster: return "all-in-one-cluster";
        case InitMode::OneClusterEach: return "one-cluster-each";
        case InitMode::RandomK: return "random-k";
    }
    return "all-in-one-cluster";
}

InitMode init_mode_from_string(const std::string& name) {
    if (name == "all-in-one-cluster") return InitMode::AllInOneCluster;
    if (name == "one-cluster-each") return InitMode::OneClusterEach;
    if (name == "random-k") return InitMode::RandomK;
    throw std::invalid_argument("unknown init mode: " + name);
}

double log_beta_function(std::span<const double> alphas) {
    if (alphas.empty()) throw std::domain_error("beta function of empty vector");
    double lg = 0.0, total = 0.0;
    for (double a : alphas) {
        if (!(a > 0.0)) throw std::domain_error("beta function requires positive arguments");
        lg += std::lgamma(a);
        total += a;
    }
    return lg - std::lgamma(total);
}

double beta_function(std::span<const double> alphas) { return std::exp(log_beta_function(alphas)); }

double dirichlet_density(std::span<const double> weights, std::span<const double> alphas) {
    if (weights.size() != alphas.size())
        throw std::domain_error("dirichlet_density: weights/alphas length mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw std::domain_error("dirichlet_density: weights must be positive");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::domain_error("dirichlet_density: weights must sum to 1");
    double log_num = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i)
        log_num += (alphas[i] - 1.0) * std::log(weights[i]);
    return std::exp(log_num - log_beta_function(alphas));
}

double posterior_predictive_logdensity(const ClusterStats& stats, std::span<const double> x,
                                       const ResolvedHyper& hp) {
    if (x.size() != hp.dim()) throw std::invalid_argument("predictive: dimension mismatch");
    if (stats.count > 0 && stats.dim() != hp.dim())
        throw std::invalid_argument("predictive: stats dimension mismatch");
    double lp = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const auto p = posterior_dim(stats.count == 0 ? ClusterStats(x.size()) : stats, j, hp);
        const double scale_sq = (p.nu_sigma_sq_n / p.nu_n) * (p.kappa_n + 1.0) / p.kappa_n;
        lp += log_student_t(x[j], p.nu_n, p.mu_n, scale_sq);
    }
    return lp;
}

std::vector<double> crp_assignment_probs(std::span<const double> x, std::size_t n_total,
                                         std::span<const ClusterStats> clusters,
                                         const ResolvedHyper& hp) {
    if (n_total == 0) throw std::invalid_argument("crp_assignment_probs: empty frame");
    std::vector<double> logw(clusters.size() + 1);
    for (std::size_t k = 0; k < clusters.size(); ++k) {
        if (clusters[k].count == 0)
            throw std::invalid_argument("crp_assignment_probs: empty cluster in candidate set");
        logw[k] = std::log(double(clusters[k].count)) +
                  posterior_predictive_logdensity(clusters[k], x, hp);
    }
    logw.back() =
        std::log(hp.alpha) + posterior_predictive_logdensity(ClusterStats(x.size()), x, hp);
    normalize_log_weights(logw);
    return logw;
}

GibbsSampler::GibbsSampler(const TimeFrame& frame, ResolvedHyper hp, GibbsConfig cfg,
                           std::uint64_t seed)
    : frame_(frame), hp_(std::move(hp)), cfg_(cfg), rng_(seed) {
    frame_.validate();
    if (frame_.dim() != hp_.dim())
        throw std::invalid_argument("gibbs: hyperparameter dimension mismatch");
    if (cfg_.max_iterations < 1) throw std::invalid_argument("gibbs: max_iterations must be >= 1");

    lgamma_by_count_.reserve(frame_.size() + 2);
    const ClusterStats empty(frame_.dim());
    prior_cache_ = ClusterCache{};
    refresh_into(prior_cache_, empty);
    init_assignments();
}

// lgamma((nu0+n+1)/2) - lgamma((nu0+n)/2) - 0.5*log(nu0+n), grown on demand.
double GibbsSampler::count_constant(std::size_t n) {
    while (lgamma_by_count_.size() <= n) {
        const double nu = hp_.nu0 + double(lgamma_by_count_.size());
        lgamma_by_count_.push_back(std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
                                   0.5 * std::log(nu));
    }
    return lgamma_by_count_[n];
}

void GibbsSampler::refresh_into(ClusterCache& c, const ClusterStats& stats) {
    const std::size_t d = hp_.dim();
    c.mu.resize(d);
    c.inv_lambda.resize(d);
    const double nu = hp_.nu0 + double(stats.count);
    c.inv_nu = 1.0 / nu;
    c.half_nu_plus_1 = (nu + 1.0) / 2.0;
    double log_const = double(d) * count_constant(stats.count);
    for (std::size_t j = 0; j < d; ++j) {
        const auto p = posterior_dim(stats, j, hp_);
        const double scale_sq = (p.nu_sigma_sq_n / p.nu_n) * (p.kappa_n + 1.0) / p.kappa_n;
        c.mu[j] = p.mu_n;
        c.inv_lambda[j] = 1.0 / scale_sq;
        log_const -= 0.5 * std::log(kPi * scale_sq);
    }
    c.log_const = log_const;
}

void GibbsSampler::refresh_cache(std::size_t cluster) {
    refresh_into(caches_[cluster], clusters_[cluster]);
}

double GibbsSampler::predictive_logdensity(const ClusterCache& c,
                                           std::span<const double> x) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double dx = x[j] - c.mu[j];
        acc += std::log1p(dx * dx * c.inv_lambda[j] * c.inv_nu);
    }
    return c.log_const - c.half_nu_plus_1 * acc;
}

void GibbsSampler::init_assignments() {
    const std::size_t n = frame_.size();
    assignment_.assign(n, -1);
    clusters_.clear();
    caches_.clear();
    switch (cfg_.init_mode) {
        case InitMode::AllInOneCluster:
            clusters_.emplace_back(frame_.dim());
            caches_.emplace_back();
            for (std::size_t i = 0; i < n; ++i) {
                clusters_[0].add(frame_.fingerprints[i].features);
                assignment_[i] = 0;
            }
            refresh_cache(0);
            break;
        case InitMode::OneClusterEach:
            for (std::size_t i = 0; i < n; ++i) {
                clusters_.emplace_back(frame_.dim());
                caches_.emplace_back();
                clusters_[i].add(frame_.fingerprints[i].features);
                assignment_[i] = int(i);
                refresh_cache(i);
            }
            break;
        case InitMode::RandomK: {
            const int k = std::max(1, cfg_.random_k);
            for (int c = 0; c < k; ++c) {
                clusters_.emplace_back(frame_.dim());
                caches_.emplace_back();
            }
            for (std::size_t i = 0; i < n; ++i) {
                const int c = int(rng_.uniform_below(std::uint64_t(k)));
                clusters_[c].add(frame_.fingerprints[i].features);
                assignment_[i] = c;
            }
            // drop clusters the random init left empty
            for (std::size_t c = clusters_.size(); c-- > 0;) {
                if (clusters_[c].count == 0) {
                    clusters_.erase(clusters_.begin() + long(c));
                    caches_.erase(caches_.begin() + long(c));
                    for (auto& a : assignment_)
                        if (a > int(c)) --a;
                }
            }
            for (std::size_t c = 0; c < clusters_.size(); ++c) refresh_cache(c);
            break;
        }
    }
}

void GibbsSampler::remove_point(std::size_t i) {
    const int c = assignment_[i];
    clusters_[c].remove(frame_.fingerprints[i].features);
    if (clusters_[c].count == 0) {
        clusters_.erase(clusters_.begin() + c);
        caches_.erase(caches_.begin() + c);
        for (auto& a : assignment_)
            if (a > c) --a;
    } else {
        refresh_cache(std::size_t(c));
    }
    assignment_[i] = -1;
}

void GibbsSampler::insert_point(std::size_t i, std::size_t cluster) {
    if (cluster == clusters_.size()) {
        clusters_.emplace_back(frame_.dim());
        caches_.emplace_back();
    }
    clusters_[cluster].add(frame_.fingerprints[i].features);
    refresh_cache(cluster);
    assignment_[i] = int(cluster);
}

void GibbsSampler::sweep() {
    const std::size_t n = frame_.size();
    for (std::size_t i = 0; i < n; ++i) {
        remove_point(i);
        const std::span<const double> x = frame_.fingerprints[i].features;
        probs_.resize(clusters_.size() + 1);
        for (std::size_t k = 0; k < clusters_.size(); ++k)
            probs_[k] = std::log(double(clusters_[k].count)) +
                        predictive_logdensity(caches_[k], x);
        probs_.back() = std::log(hp_.alpha) + predictive_logdensity(prior_cache_, x);
        normalize_log_weights(probs_);
        insert_point(i, rng_.categorical(probs_));
    }
}

void GibbsSampler::run() {
    for (int it = 0; it < cfg_.max_iterations; ++it) sweep();
}

Labeling GibbsSampler::labeling() const {
    Labeling raw = Labeling::from_labels(std::vector<int>(assignment_.begin(), assignment_.end()));
    return compact_labels(raw);
}

Labeling gibbs_cluster(const TimeFrame& frame, const ResolvedHyper& hp, const GibbsConfig& cfg,
                       std::uint64_t seed) {
    GibbsSampler sampler(frame, hp, cfg, seed);
    sampler.run();
    return sampler.labeling();
}

Labeling gibbs_cluster(const TimeFrame& frame, const Hyperparameters& hp, const GibbsConfig& cfg,
                       std::uint64_t seed) {
    return gibbs_cluster(frame, resolve(hp, frame), cfg, seed);
}

}  // namespace fpdetect::igmm
