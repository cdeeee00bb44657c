#include "ore/estimator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ore {

double Rng::uniform() {
    // 53 uniform bits -> [0, 1).
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_int(std::uint64_t n) {
    // Modulo with rejection to stay unbiased and platform-stable.
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v = engine_();
    while (v >= limit) {
        v = engine_();
    }
    return v % n;
}

double Rng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::uint64_t mix_seed(std::uint64_t seed, const std::string& id) {
    // FNV-1a over the id, folded into the base seed.
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : id) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return seed ^ (h + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2));
}

Normalizer fit_normalizer(const std::vector<FeatureVector>& pool) {
    if (pool.empty()) {
        throw std::invalid_argument("fit_normalizer needs a non-empty pool");
    }
    size_t dim = pool.front().size();
    Normalizer n;
    n.mins.assign(dim, 0.0);
    n.maxs.assign(dim, 0.0);
    for (size_t j = 0; j < dim; ++j) {
        n.mins[j] = n.maxs[j] = pool.front()[j];
    }
    for (const auto& x : pool) {
        if (x.size() != dim) {
            throw std::invalid_argument("fit_normalizer: inconsistent feature dimensions");
        }
        for (size_t j = 0; j < dim; ++j) {
            n.mins[j] = std::min(n.mins[j], x[j]);
            n.maxs[j] = std::max(n.maxs[j], x[j]);
        }
    }
    return n;
}

FeatureVector apply(const Normalizer& normalizer, const FeatureVector& x) {
    if (static_cast<int>(x.size()) != normalizer.dim()) {
        throw std::invalid_argument("apply: dimension mismatch");
    }
    FeatureVector out(x.size());
    for (size_t j = 0; j < x.size(); ++j) {
        if (normalizer.constant_dim(static_cast<int>(j))) {
            out[j] = 0.5;
        } else {
            double v = (x[j] - normalizer.mins[j]) / (normalizer.maxs[j] - normalizer.mins[j]);
            out[j] = std::min(1.0, std::max(0.0, v));
        }
    }
    return out;
}

EstimatorState init_estimator(int dim, std::uint64_t seed, double lambda) {
    if (dim < 1) {
        throw std::invalid_argument("estimator dimension must be >= 1");
    }
    if (lambda < 0.0) {
        throw std::invalid_argument("ridge lambda must be >= 0");
    }
    EstimatorState state;
    state.lambda = lambda;
    state.rng_seed = seed;
    Rng rng(seed);
    state.alpha.resize(dim);
    for (double& a : state.alpha) {
        a = rng.normal();
    }
    return state;
}

double estrel(const EstimatorState& state, const FeatureVector& x) {
    if (x.size() != state.alpha.size()) {
        throw std::invalid_argument("estrel: dimension mismatch");
    }
    double sum = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sum += state.alpha[i] * x[i];
    }
    return sum;
}

double estimation_error(const EstimatorState& state, const FeatureVector& x, double phi_score) {
    double diff = phi_score - estrel(state, x);
    return 0.5 * diff * diff;
}

std::vector<double> solve_ridge(std::vector<std::vector<double>> gram, std::vector<double> rhs,
                                double lambda) {
    size_t n = rhs.size();
    for (size_t i = 0; i < n; ++i) {
        gram[i][i] += lambda;
    }
    // Cholesky: gram = L L^T.
    std::vector<std::vector<double>> chol(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j <= i; ++j) {
            double sum = gram[i][j];
            for (size_t k = 0; k < j; ++k) {
                sum -= chol[i][k] * chol[j][k];
            }
            if (i == j) {
                if (sum <= 0.0) {
                    throw std::runtime_error("ridge system is not positive definite");
                }
                chol[i][j] = std::sqrt(sum);
            } else {
                chol[i][j] = sum / chol[j][j];
            }
        }
    }
    // Forward then backward substitution.
    std::vector<double> y(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        double sum = rhs[i];
        for (size_t k = 0; k < i; ++k) {
            sum -= chol[i][k] * y[k];
        }
        y[i] = sum / chol[i][i];
    }
    std::vector<double> x(n, 0.0);
    for (size_t ii = n; ii-- > 0;) {
        double sum = y[ii];
        for (size_t k = ii + 1; k < n; ++k) {
            sum -= chol[k][ii] * x[k];
        }
        x[ii] = sum / chol[ii][ii];
    }
    return x;
}

void fit(EstimatorState& state, const std::vector<std::pair<FeatureVector, double>>& new_pairs) {
    if (new_pairs.empty()) {
        throw std::invalid_argument("fit needs at least one new pair");
    }
    size_t dim = state.alpha.size();
    for (const auto& [x, target] : new_pairs) {
        if (x.size() != dim) {
            throw std::invalid_argument("fit: feature dimension mismatch");
        }
        if (!std::isfinite(target)) {
            throw std::invalid_argument("fit: non-finite target");
        }
        for (double v : x) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("fit: non-finite feature value");
            }
        }
        state.training_pairs.emplace_back(x, target);
    }

    std::vector<std::vector<double>> gram(dim, std::vector<double>(dim, 0.0));
    std::vector<double> rhs(dim, 0.0);
    for (const auto& [x, target] : state.training_pairs) {
        for (size_t i = 0; i < dim; ++i) {
            rhs[i] += target * x[i];
            for (size_t j = 0; j <= i; ++j) {
                gram[i][j] += x[i] * x[j];
            }
        }
    }
    for (size_t i = 0; i < dim; ++i) {
        for (size_t j = i + 1; j < dim; ++j) {
            gram[i][j] = gram[j][i];
        }
    }
    // lambda = 0 with rank-deficient data would not be solvable; nudge just
    // enough to keep the factorization alive.
    double lambda = state.lambda > 0.0 ? state.lambda : 1e-12;
    state.alpha = solve_ridge(std::move(gram), std::move(rhs), lambda);
}

}  // namespace ore
