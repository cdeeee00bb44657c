#pragma once

// The online linear relevance estimator: x -> alpha . x, refit after every
// scored batch by exact ridge regression over all accumulated training
// pairs, plus the min-max feature normalizer fitted on a reference pool.

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ore {

using FeatureVector = std::vector<double>;

/// Deterministic random source: std::mt19937_64 is bit-stable everywhere,
/// and the normal/uniform transforms are hand-rolled so no library
/// distribution variance leaks in.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform();
    /// Uniform integer in [0, n), n >= 1.
    std::uint64_t uniform_int(std::uint64_t n);
    /// Standard normal via Box-Muller.
    double normal();

private:
    std::mt19937_64 engine_;
};

/// Mixes a base seed with a string id (FNV-1a) for per-query streams.
std::uint64_t mix_seed(std::uint64_t seed, const std::string& id);

struct Normalizer {
    std::vector<double> mins;
    std::vector<double> maxs;

    int dim() const { return static_cast<int>(mins.size()); }
    bool constant_dim(int i) const { return maxs[i] <= mins[i]; }
};

/// Per-dimension min/max over a non-empty pool.
Normalizer fit_normalizer(const std::vector<FeatureVector>& pool);

/// Affine map sending min -> 0 and max -> 1, clipped to [0, 1]. A dimension
/// that was constant when fitted maps every value to 0.5.
FeatureVector apply(const Normalizer& normalizer, const FeatureVector& x);

struct EstimatorState {
    std::vector<double> alpha;
    std::vector<std::pair<FeatureVector, double>> training_pairs;
    double lambda = 1e-3;
    std::uint64_t rng_seed = 0;

    int dim() const { return static_cast<int>(alpha.size()); }
};

/// alpha sampled i.i.d. N(0,1) from the seeded generator; no training pairs.
EstimatorState init_estimator(int dim, std::uint64_t seed, double lambda);

/// alpha . x (dimensions must match).
double estrel(const EstimatorState& state, const FeatureVector& x);

/// 0.5 * (phi_score - estrel(state, x))^2.
double estimation_error(const EstimatorState& state, const FeatureVector& x, double phi_score);

/// Appends the pairs and refits alpha as the exact minimizer of
///   sum_i 0.5 * (phi_i - alpha . x_i)^2 + 0.5 * lambda * |alpha|^2
/// over all accumulated pairs (Cholesky solve of the normal equations).
void fit(EstimatorState& state, const std::vector<std::pair<FeatureVector, double>>& new_pairs);

/// Solves (A + lambda I) x = b for symmetric positive definite A.
std::vector<double> solve_ridge(std::vector<std::vector<double>> gram, std::vector<double> rhs,
                                double lambda);

}  // namespace ore
