#include "doctest.h"

#include "sabc/simulator.hpp"

#include <cmath>

using namespace sabc;

namespace {

Vector linear_theta(const Dictionary& d, double k, double c)
{
    Vector theta = Vector::Zero(static_cast<Eigen::Index>(d.size()));
    theta[*d.index_of("x")] = -k;
    theta[*d.index_of("xd")] = -c;
    return theta;
}

Vector grid(std::size_t m, double dt)
{
    Vector t(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) t[static_cast<Eigen::Index>(i)] = static_cast<double>(i + 1) * dt;
    return t;
}

}  // namespace

TEST_CASE("zero model gives zero acceleration")
{
    const Dictionary d = oscillator21();
    auto acc = simulate_acceleration(d, Vector::Zero(21), 0.0, 0.0, 1e-3, 1, 100, SimOptions{});
    REQUIRE(acc);
    CHECK(acc->cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("undamped oscillator against the closed form")
{
    const Dictionary d = oscillator21();
    const Vector theta = linear_theta(d, 500.0, 0.0);
    SimOptions opts;
    opts.substeps = 10;
    auto acc = simulate_acceleration(d, theta, 0.1, 0.0, 1e-3, 1, 1000, opts);
    REQUIRE(acc);
    double err = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double t = (i + 1) * 1e-3;
        err = std::max(err, std::abs((*acc)[i] + 50.0 * std::cos(std::sqrt(500.0) * t)));
    }
    CHECK(err < 1e-6);
}

TEST_CASE("Duffing at the origin stays at rest")
{
    const Benchmark b = benchmark("duffing");
    const Dictionary d = b.truth_dictionary();
    auto acc = simulate_acceleration(d, b.truth_theta(), 0.0, 0.0, 1e-3, 1, 1000, SimOptions{});
    REQUIRE(acc);
    CHECK(acc->cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("divergence is reported as a value")
{
    const Dictionary d = oscillator21();
    Vector theta = Vector::Zero(21);
    theta[*d.index_of("x^3")] = 1e6;  // explosive
    CHECK_FALSE(simulate_acceleration(d, theta, 0.5, 0.0, 1e-3, 1, 1000, SimOptions{}).has_value());
}

TEST_CASE("RK4 order: halving the step cuts the error about 16x")
{
    const Benchmark b = benchmark("linear");
    const Dictionary d = b.truth_dictionary();
    const Vector theta = b.truth_theta();
    const double dt = 0.01;
    const std::size_t m = 100;
    const Matrix ref = reference_states(d, theta, b.x0, b.v0, grid(m, dt), 1e-10);

    auto err = [&](int substeps) {
        SimOptions o;
        o.substeps = substeps;
        auto s = simulate_states(d, theta, b.x0, b.v0, dt, 1, m, o);
        REQUIRE(s);
        return (*s - ref).col(0).cwiseAbs().maxCoeff();
    };
    const double ratio = err(1) / err(2);
    CHECK(ratio > 8.0);
    CHECK(ratio < 32.0);
}

TEST_CASE("damped linear oscillator loses energy")
{
    const Benchmark b = benchmark("linear");
    const Dictionary d = b.truth_dictionary();
    auto s = simulate_states(d, b.truth_theta(), b.x0, b.v0, b.dt, 1, b.samples, SimOptions{});
    REQUIRE(s);
    double prev = 0.5 * 500.0 * b.x0 * b.x0;
    for (Eigen::Index i = 0; i < s->rows(); ++i) {
        const double e = 0.5 * (*s)(i, 1) * (*s)(i, 1) + 0.5 * 500.0 * (*s)(i, 0) * (*s)(i, 0);
        CHECK(e <= prev + 1e-9);
        prev = e;
    }
}

TEST_CASE("simulation is pure")
{
    const Benchmark b = benchmark("viscous");
    const Dictionary d = b.truth_dictionary();
    auto a1 = simulate_acceleration(d, b.truth_theta(), b.x0, b.v0, b.dt, 1, b.samples, SimOptions{});
    auto a2 = simulate_acceleration(d, b.truth_theta(), b.x0, b.v0, b.dt, 1, b.samples, SimOptions{});
    REQUIRE(a1);
    REQUIRE(a2);
    CHECK((*a1).cwiseEqual(*a2).all());
}

TEST_CASE("benchmark grids and truths")
{
    const Benchmark p = benchmark("pendulum");
    CHECK(p.samples == 300);
    CHECK(p.dt == doctest::Approx(1.0 / 30.0));
    CHECK(p.x0 == 0.0);
    CHECK(p.v0 == 0.0);
    const Dictionary pd = p.truth_dictionary();
    const Vector pt = p.truth_theta();
    CHECK(pt[*pd.index_of("1")] == 0.4);
    CHECK(pt[*pd.index_of("xd")] == -0.5);
    CHECK(pt[*pd.index_of("sin(x)")] == -1.0);

    const Benchmark l = benchmark("linear");
    CHECK(l.samples == 1000);
    CHECK(l.dt == 1e-3);
    CHECK(l.x0 == 0.1);

    const Benchmark v = benchmark("viscous");
    const Dictionary vd = v.truth_dictionary();
    CHECK(v.truth_theta()[*vd.index_of("xd|xd|")] == -0.8);

    CHECK_THROWS_AS(benchmark("lorenz"), InputError);

    const Dataset ds = generate_benchmark("pendulum", 0.02, 7);
    CHECK(ds.size() == 300);
    CHECK(ds.t()[299] == doctest::Approx(10.0));
    CHECK(ds.lead() == 1);
    CHECK(default_substeps(ds.dt()) == 10);
    CHECK(default_substeps(1e-3) == 1);
}

TEST_CASE("noise-free benchmark equals the reference integration")
{
    const Benchmark b = benchmark("duffing");
    const Dataset ds = generate_benchmark("duffing", 0.0, 3);
    const Dictionary d = b.truth_dictionary();
    const Matrix s = reference_states(d, b.truth_theta(), b.x0, b.v0, ds.t(), 1e-9);
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        CHECK(ds.acc()[i] == d.predicted_acceleration(b.truth_theta(), s(i, 0), s(i, 1)));
    }
}

TEST_CASE("noise model")
{
    const Vector clean = generate_benchmark("linear", 0.0, 0).acc();
    CHECK(add_noise(clean, 0.0, 9).cwiseEqual(clean).all());
    CHECK(add_noise(clean, 0.02, 9).cwiseEqual(add_noise(clean, 0.02, 9)).all());
    CHECK_FALSE(add_noise(clean, 0.02, 9).cwiseEqual(add_noise(clean, 0.02, 10)).all());

    Vector big(100000);
    for (Eigen::Index i = 0; i < big.size(); ++i) big[i] = std::sin(0.001 * static_cast<double>(i));
    const Vector noise = add_noise(big, 0.02, 4) - big;
    const double want = 0.02 * population_std(big);
    CHECK(std::abs(population_std(noise) - want) < 0.02 * want);
}

TEST_CASE("dataset validation")
{
    Vector t(3), a(3);
    t << 0.1, 0.2, 0.3;
    a << 1, 2, 3;
    const Dataset ds(t, a, 0.0, 0.0);
    CHECK(ds.sigma2() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(ds.lead() == 1);

    Vector bad(3);
    bad << 0.1, 0.2, 0.35;
    CHECK_THROWS_AS(Dataset(bad, a, 0.0, 0.0), InputError);
    CHECK_THROWS_AS(Dataset(Vector::Constant(1, 0.1), Vector::Constant(1, 1.0), 0.0, 0.0), InputError);
    Vector offgrid(3);
    offgrid << 0.15, 0.25, 0.35;
    offgrid.array() -= 0.1 + 0.025;  // t0 = 0.025 is not a multiple of dt = 0.1
    CHECK_THROWS_AS(Dataset(offgrid, a, 0.0, 0.0), InputError);
    CHECK_THROWS_AS((SimOptions{0, 1e8}.validate()), InputError);
}
