#include "doctest.h"

#include "sabc/gmm.hpp"
#include "sabc/loss.hpp"

#include <cmath>
#include <numbers>

using namespace sabc;

namespace {

Matrix cloud(Rng& rng, int n, const std::vector<Vector>& centers, double sd)
{
    std::normal_distribution<double> n01;
    const auto d = centers.front().size();
    Matrix out(n, d);
    for (int i = 0; i < n; ++i) {
        const Vector& c = centers[static_cast<std::size_t>(i) % centers.size()];
        for (Eigen::Index k = 0; k < d; ++k) out(i, k) = c[k] + sd * n01(rng);
    }
    return out;
}

Vector vec(std::initializer_list<double> v)
{
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

}  // namespace

TEST_CASE("single Gaussian fit is the closed-form MLE")
{
    Rng rng(1);
    const Matrix X = cloud(rng, 150, {vec({1, -2, 3})}, 2.0);
    const Vector ridge = Vector::Constant(3, 1e-6);
    Rng fit_rng(2);
    const EmFit f = em_fit(X, 1, fit_rng, 1e-10, 50, ridge);

    const Vector mu = X.colwise().mean();
    const Matrix C = X.rowwise() - mu.transpose();
    const Matrix S = (C.transpose() * C) / 150.0 + Matrix(ridge.asDiagonal());
    CHECK((f.mixture.means()[0] - mu).norm() < 1e-10);
    CHECK((f.mixture.covariances()[0] - S).norm() < 1e-9);

    Eigen::LLT<Matrix> llt(S);
    const Matrix L = llt.matrixL();
    double logdet = 2.0 * L.diagonal().array().log().sum();
    double ll = 0.0;
    for (int i = 0; i < 150; ++i) {
        const Vector r = X.row(i).transpose() - mu;
        ll += -0.5 * (3 * std::log(2 * std::numbers::pi) + logdet + r.dot(llt.solve(r)));
    }
    CHECK(f.loglik == doctest::Approx(ll).epsilon(1e-10));
}

TEST_CASE("identical points give a ridge-only covariance")
{
    const Matrix X = Matrix::Constant(10, 2, 4.0);
    Rng rng(0);
    const EmFit f = em_fit(X, 1, rng, 1e-8, 20, Vector::Constant(2, 1e-6));
    CHECK((f.mixture.covariances()[0] - 1e-6 * Matrix::Identity(2, 2)).norm() < 1e-18);
    CHECK(f.mixture.means()[0].isApprox(vec({4, 4})));
}

TEST_CASE("two separated clusters are recovered")
{
    Rng rng(4);
    Matrix X(300, 1);
    std::normal_distribution<double> n01;
    for (int i = 0; i < 300; ++i) X(i, 0) = (i < 90 ? -10.0 : 10.0) + n01(rng);
    const MixtureSelection sel = select_mixture(X, 2, 7, EmOptions{});
    REQUIRE(sel.K == 2);
    const auto& m = sel.mixture;
    const int lo = m.means()[0][0] < m.means()[1][0] ? 0 : 1;
    CHECK(std::abs(m.means()[static_cast<std::size_t>(lo)][0] + 10.0) < 0.5);
    CHECK(std::abs(m.means()[static_cast<std::size_t>(1 - lo)][0] - 10.0) < 0.5);
    CHECK(std::abs(m.weights()[lo] - 0.3) < 0.05);
}

TEST_CASE("EM objective never decreases")
{
    Rng rng(12);
    const Matrix X = cloud(rng, 240, {vec({0, 0, 0}), vec({6, 1, -2}), vec({-3, 5, 2})}, 1.5);
    const Vector ridge = default_ridge(X, 1e-6);
    for (int K = 1; K <= 5; ++K) {
        for (int r = 0; r < 3; ++r) {
            Rng fit_rng = make_stream(5, {static_cast<std::uint64_t>(K), static_cast<std::uint64_t>(r)});
            const EmFit f = em_fit(X, K, fit_rng, 1e-12, 200, ridge);
            REQUIRE(f.objective_trace.size() >= 1);
            for (std::size_t i = 1; i < f.objective_trace.size(); ++i) {
                CHECK(f.objective_trace[i] >= f.objective_trace[i - 1] - 1e-9);
            }
        }
    }
}

TEST_CASE("responsibilities are row-normalised")
{
    Rng rng(21);
    const Matrix X = cloud(rng, 100, {vec({0, 0}), vec({3, 3})}, 1.0);
    const MixtureSelection sel = select_mixture(X, 4, 3, EmOptions{});
    const Matrix R = responsibilities(sel.mixture, X);
    for (Eigen::Index i = 0; i < R.rows(); ++i) CHECK(std::abs(R.row(i).sum() - 1.0) <= 1e-12);
}

TEST_CASE("BIC arithmetic")
{
    CHECK(bic(-100.0, 1, 50, 2) == doctest::Approx(5 * std::log(50.0) + 200.0).epsilon(1e-15));
    CHECK(bic(-100.0, 2, 50, 2) > bic(-100.0, 1, 50, 2));
    CHECK(bic(-3.5, 1, 1, 1) == 7.0);
}

TEST_CASE("BIC picks the number of clusters")
{
    Rng rng(31);
    const Matrix one = cloud(rng, 200, {vec({1, 2, 3})}, 0.5);
    CHECK(select_mixture(one, 5, 1, EmOptions{}).K == 1);

    const Matrix three = cloud(rng, 300, {vec({0, 0, 0}), vec({20, 0, 0}), vec({0, 20, 0})}, 1.0);
    CHECK(select_mixture(three, 5, 1, EmOptions{}).K == 3);
    CHECK(select_mixture(three, 1, 1, EmOptions{}).K == 1);
}

TEST_CASE("constant coordinates do not disturb the fit")
{
    Rng rng(41);
    Matrix X = cloud(rng, 120, {vec({0, 0, 0, 0}), vec({8, 8, 0, 0})}, 1.0);
    X.col(2).setZero();
    X.col(3).setConstant(5.0);
    const MixtureSelection sel = select_mixture(X, 4, 9, EmOptions{});
    CHECK(sel.K == 2);
    for (const auto& mu : sel.mixture.means()) {
        CHECK(mu[2] == 0.0);
        CHECK(mu[3] == 5.0);
    }
    CHECK(std::isfinite(sel.mixture.log_likelihood(X)));
}

TEST_CASE("fit errors")
{
    Rng rng(0);
    CHECK_THROWS_AS(em_fit(Matrix::Zero(2, 3), 3, rng, 1e-6, 10, Vector::Constant(3, 1e-6)), FitError);
    CHECK_THROWS_AS(GaussianMixture(vec({0.5, 0.4}), {vec({0}), vec({1})}, {Matrix::Identity(1, 1), Matrix::Identity(1, 1)}),
                    FitError);
    CHECK_THROWS_AS(GaussianMixture(vec({1.0}), {vec({0})}, {Matrix::Constant(1, 1, -1.0)}), FitError);
}

TEST_CASE("sparse proposal zero fraction")
{
    // standard normal slab in 10 coordinates
    const GaussianMixture g(vec({1.0}), {Vector::Zero(10)}, {Matrix::Identity(10, 10)});
    const double eta = 0.9, lam = 0.5;
    const Vector lambda = Vector::Constant(10, lam);
    Rng rng(77);
    long zeros = 0, total = 0;
    for (int i = 0; i < 20000; ++i) {
        const Vector th = sample_sparse_particle(g, eta, lambda, rng);
        zeros += th.size() - l0_norm(th);
        total += th.size();
    }
    const double p_small = std::erf(lam / std::sqrt(2.0));
    const double want = 0.5 * (1 - eta + eta * p_small);
    CHECK(std::abs(static_cast<double>(zeros) / static_cast<double>(total) - want) < 0.005);

    // eta = 1 and lambda = 0: every draw is a plain mixture draw
    Rng r2(3);
    for (int i = 0; i < 200; ++i) CHECK(l0_norm(sample_sparse_particle(g, 1.0, Vector::Zero(10), r2)) == 10);

    Rng a(5), b(5);
    CHECK(sample_sparse_particle(g, eta, lambda, a).cwiseEqual(sample_sparse_particle(g, eta, lambda, b)).all());
}

TEST_CASE("covariance inflation keeps only the scaled diagonal")
{
    Matrix S(2, 2);
    S << 4, 1, 1, 9;
    const GaussianMixture g(vec({1.0}), {vec({0, 0})}, {S});
    const GaussianMixture w = inflate_covariance(g, 2.0);
    Matrix want(2, 2);
    want << 8, 0, 0, 18;
    CHECK(w.covariances()[0] == want);
    CHECK(w.means()[0] == g.means()[0]);

    Matrix D(2, 2);
    D << 3, 0, 0, 5;
    const GaussianMixture gd(vec({1.0}), {vec({1, 1})}, {D});
    CHECK(inflate_covariance(gd, 1.0).covariances()[0] == D);
}

TEST_CASE("mixture draws follow the component moments")
{
    Matrix S(3, 3);
    S << 4, 1.5, -0.5, 1.5, 9, 2, -0.5, 2, 1;
    const GaussianMixture g(vec({1.0}), {vec({1, -2, 30})}, {S});
    Rng rng(13);
    const int n = 200000;
    Matrix X(n, 3);
    for (int i = 0; i < n; ++i) X.row(i) = g.sample(rng).transpose();
    const Vector mu = X.colwise().mean();
    const Matrix C = X.rowwise() - mu.transpose();
    const Matrix emp = (C.transpose() * C) / n;
    CHECK((mu - g.means()[0]).cwiseAbs().maxCoeff() < 0.05);
    CHECK((emp - S).cwiseAbs().maxCoeff() < 0.1);
}
