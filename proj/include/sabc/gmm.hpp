#pragma once

#include "sabc/random.hpp"
#include "sabc/types.hpp"

#include <Eigen/Cholesky>

#include <cstdint>
#include <vector>

namespace sabc {

/// Finite mixture of multivariate normals, with cached Cholesky factors for sampling.
class GaussianMixture {
public:
    GaussianMixture() = default;
    /// Throws FitError if the weights are not a distribution or a covariance is not PD.
    GaussianMixture(Vector weights, std::vector<Vector> means, std::vector<Matrix> covariances);

    int components() const { return static_cast<int>(weights_.size()); }
    Eigen::Index dim() const { return means_.empty() ? 0 : means_.front().size(); }
    const Vector& weights() const { return weights_; }
    const std::vector<Vector>& means() const { return means_; }
    const std::vector<Matrix>& covariances() const { return covariances_; }
    /// Lower Cholesky factor of covariance j.
    const Matrix& factor(int j) const { return factors_[static_cast<std::size_t>(j)]; }

    /// One draw: component by weight, then mean + L z.
    Vector sample(Rng& rng) const;

    /// sum_i log sum_j w_j N(x_i | mu_j, Sigma_j); rows of `points` are observations.
    double log_likelihood(const Matrix& points) const;

private:
    Vector weights_;
    std::vector<Vector> means_;
    std::vector<Matrix> covariances_;
    std::vector<Matrix> factors_;
};

struct EmOptions {
    int restarts = 3;
    double tol = 1e-6;       // relative log-likelihood change
    int max_iter = 200;
    double ridge_rel = 1e-6; // per-coordinate ridge = ridge_rel * coordinate variance
};

struct EmFit {
    GaussianMixture mixture;
    double loglik = 0.0;                  // plain log-likelihood of the returned mixture
    std::vector<double> objective_trace;  // penalised log-likelihood per parameter set visited
    int iterations = 0;
};

/// Diagonal ridge for a point cloud: ridge_rel times each coordinate's variance.
/// Coordinates that are constant across all points get ridge_rel * 1e-12 times the
/// mean variance (or ridge_rel itself when every coordinate is constant).
Vector default_ridge(const Matrix& points, double ridge_rel);

/// EM from a random start: K distinct points as means, ridged sample covariance,
/// uniform weights. The ridge enters as a covariance prior
/// p(S_j) ~ exp(-tr(S_j^-1 Psi) / 2) with Psi = (n / K) diag(ridge), so the M-step is
/// S_j = C_j + Psi / N_j (exactly C_j + ridge for balanced components) and the
/// penalised log-likelihood never decreases.
/// Rows of `points` are observations.
EmFit em_fit(const Matrix& points, int K, Rng& rng, double tol, int max_iter, const Vector& ridge);

/// Responsibilities r_ij of `mixture` for each row of points (n x K).
Matrix responsibilities(const GaussianMixture& mixture, const Matrix& points);

/// p ln(n) - 2 loglik with p = (K-1) + K d + K d(d+1)/2.
double bic(double loglik, int K, long n_points, long dim);

struct MixtureSelection {
    GaussianMixture mixture;
    int K = 0;
    double loglik = 0.0;
    std::vector<double> bic_by_k;  // index K-1; +inf where every restart failed
};

/// Fits K = 1..min(K_max, n) with `restarts` EM restarts each (best loglik wins per
/// K) and returns the lowest-BIC fit. Restart streams derive from `seed`.
MixtureSelection select_mixture(const Matrix& points, int K_max, std::uint64_t seed, const EmOptions& opts);

/// Alg. 3 proposal: mixture draw, then with probability 1/2 spike (keep each
/// coordinate with probability eta) and threshold |theta_i| <= lambda_i.
Vector sample_sparse_particle(const GaussianMixture& mixture, double eta, const Vector& lambda, Rng& rng);

/// Covariances replaced by diag(gamma * diag(Sigma_j)); weights and means kept.
GaussianMixture inflate_covariance(const GaussianMixture& mixture, double gamma);

/// Stack a list of vectors as rows.
Matrix stack_rows(const std::vector<Vector>& rows);

}  // namespace sabc
