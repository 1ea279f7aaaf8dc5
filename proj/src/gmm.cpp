#include "sabc/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>

namespace sabc {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;  // ln(2 pi)

Matrix cholesky_or_throw(const Matrix& cov, int component)
{
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw FitError("covariance of mixture component " + std::to_string(component) + " is not positive definite");
    }
    return llt.matrixL();
}

// log N(x_i | mu, Sigma) for each row, given the lower Cholesky factor.
Vector log_density_rows(const Matrix& points, const Vector& mean, const Matrix& L)
{
    const Eigen::Index d = points.cols();
    Matrix centered = (points.rowwise() - mean.transpose()).transpose();  // d x n
    L.triangularView<Eigen::Lower>().solveInPlace(centered);
    const double logdet = 2.0 * L.diagonal().array().log().sum();
    Vector out = centered.colwise().squaredNorm().transpose();
    out = (-0.5 * (out.array() + logdet + static_cast<double>(d) * kLog2Pi)).matrix();
    return out;
}

Vector row_log_sum_exp(const Matrix& a)
{
    Vector out(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double mx = a.row(i).maxCoeff();
        if (!std::isfinite(mx)) {
            out[i] = mx;
            continue;
        }
        out[i] = mx + std::log((a.row(i).array() - mx).exp().sum());
    }
    return out;
}

Vector column_variances(const Matrix& points)
{
    const Vector mean = points.colwise().mean().transpose();
    return ((points.rowwise() - mean.transpose()).array().square().colwise().sum() /
            static_cast<double>(points.rows()))
        .transpose();
}

Matrix sample_covariance(const Matrix& points)
{
    const Vector mean = points.colwise().mean().transpose();
    const Matrix c = points.rowwise() - mean.transpose();
    return (c.transpose() * c) / static_cast<double>(points.rows());
}

}  // namespace

GaussianMixture::GaussianMixture(Vector weights, std::vector<Vector> means, std::vector<Matrix> covariances)
    : weights_(std::move(weights)), means_(std::move(means)), covariances_(std::move(covariances))
{
    const auto K = static_cast<std::size_t>(weights_.size());
    if (K == 0 || means_.size() != K || covariances_.size() != K) throw FitError("mixture parts have inconsistent sizes");
    if ((weights_.array() <= 0.0).any()) throw FitError("mixture weights must be positive");
    if (std::abs(weights_.sum() - 1.0) > 1e-12) throw FitError("mixture weights must sum to 1");
    const Eigen::Index d = means_.front().size();
    factors_.reserve(K);
    for (std::size_t j = 0; j < K; ++j) {
        if (means_[j].size() != d || covariances_[j].rows() != d || covariances_[j].cols() != d) {
            throw FitError("mixture component " + std::to_string(j) + " has the wrong dimension");
        }
        factors_.push_back(cholesky_or_throw(covariances_[j], static_cast<int>(j)));
    }
}

Vector GaussianMixture::sample(Rng& rng) const
{
    const double u = uniform01(rng);
    int j = 0;
    double cum = weights_[0];
    while (u >= cum && j + 1 < components()) cum += weights_[++j];

    std::normal_distribution<double> normal(0.0, 1.0);
    Vector z(dim());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
    const auto ju = static_cast<std::size_t>(j);
    return means_[ju] + factors_[ju].triangularView<Eigen::Lower>() * z;
}

double GaussianMixture::log_likelihood(const Matrix& points) const
{
    Matrix logp(points.rows(), components());
    for (int j = 0; j < components(); ++j) {
        const auto ju = static_cast<std::size_t>(j);
        logp.col(j) = log_density_rows(points, means_[ju], factors_[ju]).array() + std::log(weights_[j]);
    }
    return row_log_sum_exp(logp).sum();
}

Vector default_ridge(const Matrix& points, double ridge_rel)
{
    const Vector var = column_variances(points);
    const double mean_var = var.size() ? var.mean() : 0.0;
    Vector r(var.size());
    for (Eigen::Index i = 0; i < var.size(); ++i) {
        if (var[i] > 0.0) r[i] = ridge_rel * var[i];
        else if (mean_var > 0.0) r[i] = ridge_rel * 1e-12 * mean_var;
        else r[i] = ridge_rel;
    }
    return r;
}

Matrix responsibilities(const GaussianMixture& mixture, const Matrix& points)
{
    Matrix logp(points.rows(), mixture.components());
    for (int j = 0; j < mixture.components(); ++j) {
        const auto ju = static_cast<std::size_t>(j);
        logp.col(j) = log_density_rows(points, mixture.means()[ju], mixture.factor(j)).array() +
                      std::log(mixture.weights()[j]);
    }
    const Vector lse = row_log_sum_exp(logp);
    return (logp.colwise() - lse).array().exp().matrix();
}

EmFit em_fit(const Matrix& points, int K, Rng& rng, double tol, int max_iter, const Vector& ridge)
{
    const Eigen::Index n = points.rows();
    const Eigen::Index d = points.cols();
    if (K < 1) throw FitError("K must be >= 1");
    if (d < 1) throw FitError("points must have at least one coordinate");
    if (n < K) throw FitError("need at least K = " + std::to_string(K) + " points, got " + std::to_string(n));
    if (ridge.size() != d || (ridge.array() <= 0.0).any()) throw FitError("ridge must be positive, one per coordinate");

    // Coordinates that are identical across all points contribute the same density
    // factor to every component; EM runs on the varying block only.
    std::vector<Eigen::Index> varying;
    std::vector<Eigen::Index> fixed;
    for (Eigen::Index c = 0; c < d; ++c) {
        (points.col(c).maxCoeff() != points.col(c).minCoeff() ? varying : fixed).push_back(c);
    }
    double fixed_logc = 0.0;  // per-point log density of the constant coordinates
    for (auto c : fixed) fixed_logc += -0.5 * (kLog2Pi + std::log(ridge[c]));
    const auto dv = static_cast<Eigen::Index>(varying.size());

    Matrix P(n, dv);
    Vector ridge_v(dv);
    for (Eigen::Index k = 0; k < dv; ++k) {
        P.col(k) = points.col(varying[static_cast<std::size_t>(k)]);
        ridge_v[k] = ridge[varying[static_cast<std::size_t>(k)]];
    }

    // initial parameters
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    for (int j = 0; j < K; ++j) {
        std::uniform_int_distribution<Eigen::Index> pick(j, n - 1);
        std::swap(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    Vector w = Vector::Constant(K, 1.0 / K);
    std::vector<Vector> mu(static_cast<std::size_t>(K));
    std::vector<Matrix> sigma(static_cast<std::size_t>(K));
    const Matrix base_cov =
        (dv > 0 ? sample_covariance(P) : Matrix(0, 0)) + Matrix(ridge_v.asDiagonal());
    for (int j = 0; j < K; ++j) {
        mu[static_cast<std::size_t>(j)] = P.row(idx[static_cast<std::size_t>(j)]).transpose();
        sigma[static_cast<std::size_t>(j)] = base_cov;
    }

    EmFit fit;
    Matrix logp(n, K);
    Vector lse;
    const Vector psi = ridge_v * (static_cast<double>(n) / K);
    double prev = 0.0;
    for (int it = 0;; ++it) {
        // E-step
        double penalty = 0.0;
        for (int j = 0; j < K; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            if (dv > 0) {
                const Matrix L = cholesky_or_throw(sigma[ju], j);
                logp.col(j) = log_density_rows(P, mu[ju], L).array() + std::log(w[j]);
                const Matrix Linv = L.triangularView<Eigen::Lower>().solve(Matrix::Identity(dv, dv));
                penalty += 0.5 * psi.dot(Linv.colwise().squaredNorm().transpose());
            } else {
                logp.col(j).setConstant(std::log(w[j]));
            }
        }
        lse = row_log_sum_exp(logp);
        if (!lse.allFinite()) throw FitError("responsibility normalisation is singular (zero mixture density)");
        const double loglik = lse.sum() + static_cast<double>(n) * fixed_logc;
        const double objective = loglik - penalty;
        fit.objective_trace.push_back(objective);
        fit.loglik = loglik;
        if (it > 0 && std::abs(objective - prev) <= tol * std::abs(prev)) break;
        if (it >= max_iter) break;
        prev = objective;

        // M-step
        const Matrix R = (logp.colwise() - lse).array().exp().matrix();
        const Vector Nk = R.colwise().sum().transpose();
        for (int j = 0; j < K; ++j) {
            if (!(Nk[j] > std::numeric_limits<double>::epsilon() * static_cast<double>(n))) {
                throw FitError("mixture component " + std::to_string(j) + " lost all responsibility (N_j = " +
                               std::to_string(Nk[j]) + ")");
            }
        }
        w = Nk / static_cast<double>(n);
        for (int j = 0; j < K; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            mu[ju] = (P.transpose() * R.col(j)) / Nk[j];
            const Matrix c = P.rowwise() - mu[ju].transpose();
            Matrix s = (c.transpose() * R.col(j).asDiagonal() * c) / Nk[j];
            s = 0.5 * (s + s.transpose());
            s.diagonal() += psi / Nk[j];
            sigma[ju] = std::move(s);
        }
        fit.iterations = it + 1;
    }

    // lift back to the full coordinate space
    std::vector<Vector> means(static_cast<std::size_t>(K), Vector::Zero(d));
    std::vector<Matrix> covs(static_cast<std::size_t>(K), Matrix::Zero(d, d));
    for (int j = 0; j < K; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        for (auto c : fixed) {
            means[ju][c] = points(0, c);
            covs[ju](c, c) = ridge[c];
        }
        for (Eigen::Index a = 0; a < dv; ++a) {
            means[ju][varying[static_cast<std::size_t>(a)]] = mu[ju][a];
            for (Eigen::Index b = 0; b < dv; ++b) {
                covs[ju](varying[static_cast<std::size_t>(a)], varying[static_cast<std::size_t>(b)]) = sigma[ju](a, b);
            }
        }
    }
    w /= w.sum();
    fit.mixture = GaussianMixture(std::move(w), std::move(means), std::move(covs));
    return fit;
}

double bic(double loglik, int K, long n_points, long dim)
{
    if (n_points < 1) throw FitError("bic needs at least one point");
    const double k = K;
    const double d = static_cast<double>(dim);
    const double p = (k - 1.0) + k * d + k * d * (d + 1.0) / 2.0;
    return p * std::log(static_cast<double>(n_points)) - 2.0 * loglik;
}

MixtureSelection select_mixture(const Matrix& points, int K_max, std::uint64_t seed, const EmOptions& opts)
{
    if (K_max < 1) throw FitError("K_max must be >= 1");
    if (points.rows() < 1) throw FitError("cannot fit a mixture to zero points");
    const Vector ridge = default_ridge(points, opts.ridge_rel);
    const int k_hi = static_cast<int>(std::min<Eigen::Index>(K_max, points.rows()));

    MixtureSelection best;
    best.bic_by_k.assign(static_cast<std::size_t>(k_hi), std::numeric_limits<double>::infinity());
    double best_bic = std::numeric_limits<double>::infinity();
    FitError last_error("no mixture could be fitted");
    for (int K = 1; K <= k_hi; ++K) {
        // K = 1 converges to the same answer from any start
        const int restarts = K == 1 ? 1 : std::max(1, opts.restarts);
        std::optional<EmFit> best_k;
        for (int r = 0; r < restarts; ++r) {
            Rng rng = make_stream(seed, {static_cast<std::uint64_t>(K), static_cast<std::uint64_t>(r)});
            try {
                EmFit f = em_fit(points, K, rng, opts.tol, opts.max_iter, ridge);
                if (!best_k || f.loglik > best_k->loglik) best_k = std::move(f);
            } catch (const FitError& e) {
                last_error = e;
            }
        }
        if (!best_k) continue;
        const double b = bic(best_k->loglik, K, points.rows(), points.cols());
        best.bic_by_k[static_cast<std::size_t>(K - 1)] = b;
        if (b < best_bic) {
            best_bic = b;
            best.K = K;
            best.loglik = best_k->loglik;
            best.mixture = std::move(best_k->mixture);
        }
    }
    if (best.K == 0) throw last_error;
    return best;
}

Vector sample_sparse_particle(const GaussianMixture& mixture, double eta, const Vector& lambda, Rng& rng)
{
    Vector theta = mixture.sample(rng);
    if (uniform01(rng) > 0.5) {
        for (Eigen::Index i = 0; i < theta.size(); ++i) {
            if (uniform01(rng) > eta) theta[i] = 0.0;
            if (std::abs(theta[i]) <= lambda[i]) theta[i] = 0.0;
        }
    }
    return theta;
}

GaussianMixture inflate_covariance(const GaussianMixture& mixture, double gamma)
{
    if (!(gamma > 0.0)) throw InputError("gamma must be > 0");
    std::vector<Matrix> covs;
    covs.reserve(mixture.covariances().size());
    for (const auto& s : mixture.covariances()) covs.push_back(Matrix((gamma * s.diagonal()).asDiagonal()));
    return GaussianMixture(mixture.weights(), mixture.means(), std::move(covs));
}

Matrix stack_rows(const std::vector<Vector>& rows)
{
    if (rows.empty()) return Matrix(0, 0);
    Matrix out(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return out;
}

}  // namespace sabc
