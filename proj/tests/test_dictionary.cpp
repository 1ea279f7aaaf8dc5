#include "doctest.h"

#include "sabc/dictionary.hpp"
#include "sabc/random.hpp"

#include <algorithm>
#include <numeric>

using namespace sabc;

TEST_CASE("polynomial groups list descending powers of x")
{
    auto g1 = polynomial_group(1);
    REQUIRE(g1.size() == 2);
    CHECK(g1[0].label() == "x");
    CHECK(g1[1].label() == "xd");

    auto g2 = polynomial_group(2);
    REQUIRE(g2.size() == 3);
    CHECK(g2[0].label() == "x^2");
    CHECK(g2[1].label() == "x*xd");
    CHECK(g2[2].label() == "xd^2");

    CHECK_THROWS_AS(polynomial_group(0), InputError);
}

TEST_CASE("count identity for [1] plus P^1..P^q")
{
    for (int q = 1; q <= 8; ++q) {
        std::size_t n = 1;
        for (int a = 1; a <= q; ++a) n += polynomial_group(a).size();
        int expected = 1;
        for (int a = 1; a <= q; ++a) expected += a + 1;
        CHECK(n == static_cast<std::size_t>(expected));
    }
}

TEST_CASE("preset dictionaries")
{
    const Dictionary p = pendulum23();
    CHECK(p.size() == 23);
    CHECK(p[0].label() == "1");
    CHECK(p[21].label() == "sin(x)");
    CHECK(p[22].label() == "sin(xd)");

    const Dictionary o = oscillator21();
    CHECK(o.size() == 21);
    const std::vector<std::string> tail = {"|x|", "|xd|", "x|x|", "x|xd|", "xd|x|", "xd|xd|"};
    auto labels = o.labels();
    CHECK(std::equal(tail.begin(), tail.end(), labels.end() - 6));

    CHECK(Dictionary::preset("pendulum23").labels() == p.labels());
    CHECK_THROWS_AS(Dictionary::preset("nope"), InputError);
}

TEST_CASE("labels parse back to the same term")
{
    for (const auto& d : {pendulum23(), oscillator21()}) {
        for (const auto& t : d.terms()) CHECK(parse_term(t.label()) == t);
    }
    CHECK_THROWS_AS(parse_term("cos(x)"), InputError);
    CHECK_THROWS_AS(parse_term("x^99"), InputError);
    CHECK_THROWS_AS(Dictionary::from_labels({"x", "x"}), InputError);
}

TEST_CASE("evaluation examples")
{
    const Dictionary d = Dictionary::from_labels({"1", "x", "xd", "x^2", "x*xd", "xd^2"});
    const Vector b = d.evaluate(1.0, 2.0);
    Vector want(6);
    want << 1, 1, 2, 1, 2, 4;
    CHECK(b == want);

    CHECK(evaluate_term(TermSpec::sine(Var::disp), 0.0, 5.0) == 0.0);
    CHECK(evaluate_term(TermSpec::signed_quad(Var::vel, Var::vel), 0.0, -3.0) == -9.0);
    CHECK_THROWS_AS(d.evaluate(std::nan(""), 0.0), Error);
}

TEST_CASE("predicted acceleration of the oscillator truths")
{
    const Dictionary d = oscillator21();
    Vector theta = Vector::Zero(21);
    CHECK(d.predicted_acceleration(theta, 0.3, -1.0) == 0.0);
    theta[*d.index_of("x")] = -500;
    theta[*d.index_of("xd")] = -0.5;
    CHECK(d.predicted_acceleration(theta, 0.1, 0.0) == doctest::Approx(-50.0).epsilon(1e-14));
    theta[*d.index_of("x^3")] = -50000;
    CHECK(d.predicted_acceleration(theta, 0.1, 0.0) == doctest::Approx(-100.0).epsilon(1e-14));
    CHECK_THROWS_AS(d.predicted_acceleration(Vector::Zero(3), 0.0, 0.0), InputError);
}

TEST_CASE("linearity and permutation invariance")
{
    const Dictionary d = pendulum23();
    Rng rng(11);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 50; ++trial) {
        Vector a(23), b(23);
        for (int i = 0; i < 23; ++i) {
            a[i] = n01(rng);
            b[i] = n01(rng);
        }
        const double x = n01(rng), v = n01(rng);
        const double lhs = d.predicted_acceleration(a + b, x, v);
        const double rhs = d.predicted_acceleration(a, x, v) + d.predicted_acceleration(b, x, v);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

        std::vector<std::size_t> perm(23);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<TermSpec> terms;
        Vector pa(23);
        for (int i = 0; i < 23; ++i) {
            terms.push_back(d[perm[static_cast<std::size_t>(i)]]);
            pa[i] = a[static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)])];
        }
        const Dictionary shuffled(terms);
        CHECK(shuffled.predicted_acceleration(pa, x, v) == doctest::Approx(d.predicted_acceleration(a, x, v)).epsilon(1e-12));
    }
}

TEST_CASE("sparse model agrees with the dense dictionary")
{
    const Dictionary d = oscillator21();
    Rng rng(5);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 20; ++trial) {
        Vector theta(21);
        for (int i = 0; i < 21; ++i) theta[i] = uniform01(rng) < 0.5 ? 0.0 : n01(rng);
        const SparseModel m(d, theta);
        const double x = n01(rng), v = n01(rng);
        CHECK(m(x, v) == doctest::Approx(d.predicted_acceleration(theta, x, v)).epsilon(1e-12));
    }
}
