#include "doctest.h"

#include "sabc/sabc.hpp"

#include <omp.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <numeric>

using namespace sabc;

namespace {

Population from_losses(const std::vector<double>& losses)
{
    Population p;
    for (double l : losses) {
        Particle part;
        part.theta = Vector::Constant(2, l);
        part.loss.total = l;
        p.particles.push_back(part);
    }
    return p;
}

double msre_of(const std::string& bench, const std::vector<std::pair<std::string, double>>& found)
{
    const Dictionary d = bench == "pendulum" ? pendulum23() : oscillator21();
    const TruthModel truth = resolve_truth(d, benchmark(bench).truth);
    Vector theta = Vector::Zero(static_cast<Eigen::Index>(d.size()));
    for (const auto& [label, c] : found) theta[static_cast<Eigen::Index>(*d.index_of(label))] = c;
    return delta2_msre(theta, truth);
}

// significant-digit comparison against four-digit reference values
bool same_4_digits(double a, double b)
{
    const double scale = std::pow(10.0, std::floor(std::log10(std::abs(b))) - 3);
    return std::round(a / scale) == std::round(b / scale);
}

SabcConfig small_config()
{
    SabcConfig cfg;
    cfg.n_particles = 40;
    cfg.alpha = 0.1;
    cfg.beta = 0.05;
    cfg.prior = {PriorSpec::Scheme::informed, 1.0};
    cfg.lambda.relative_to_prior = true;
    cfg.seed = 5;
    cfg.rounds = {RoundSettings{1e5, 0.5, std::nullopt, std::nullopt}, RoundSettings{50, 0.5, std::nullopt, 2.0}};
    return cfg;
}

}  // namespace

TEST_CASE("next threshold is the floor(alpha N)-th largest loss")
{
    std::vector<double> l(400);
    std::iota(l.begin(), l.end(), 1.0);
    CHECK(next_threshold(l, 0.05) == 381.0);
    std::vector<double> twenty(l.begin(), l.begin() + 20);
    CHECK(next_threshold(twenty, 0.05) == 20.0);
    CHECK(next_threshold({3, 1, 2, 5, 4, 9, 8, 7, 6, 10}, 0.29) == 9.0);
    CHECK_THROWS_AS(next_threshold({1, 2}, 0.05), InputError);
    CHECK_THROWS_AS(next_threshold({INFINITY, INFINITY, 1.0}, 0.9), SamplerError);
}

TEST_CASE("active set is strictly below the threshold")
{
    const Population p = from_losses({1, 2, 3, 3, 4});
    CHECK(select_active(p, 3.0).size() == 2);
    CHECK(select_active(p, 4.0).size() == 4);
    CHECK_THROWS_AS(select_active(from_losses({2, 2, 2}), 2.0), SamplerError);
}

TEST_CASE("reference error values reproduce")
{
    CHECK(same_4_digits(msre_of("pendulum", {{"1", 0.3999}, {"xd", -0.4990}, {"sin(x)", -1.002}}), 2.6875e-6));
    CHECK(same_4_digits(msre_of("linear", {{"x", -499.91}, {"xd", -0.49903}}), 1.8980e-6));
    CHECK(same_4_digits(msre_of("duffing", {{"x", -501.02}, {"xd", -0.50761}, {"x^3", -49977}}), 7.8674e-5));
}

TEST_CASE("metrics")
{
    const Dictionary d = oscillator21();
    const TruthModel truth = resolve_truth(d, benchmark("duffing").truth);
    Particle exact{Vector::Zero(21), {}};
    for (std::size_t k = 0; k < truth.size(); ++k) exact.theta[static_cast<Eigen::Index>(truth.index[k])] = truth.value[k];
    CHECK(delta1(exact, truth.size()) == 0.0);
    CHECK(delta2_msre(exact.theta, truth) == 0.0);

    Particle extra = exact;
    extra.theta[*d.index_of("|x|")] = 1.0;
    CHECK(delta1(extra, 3) == doctest::Approx(1.0 / 3.0));
    const SupportComparison c = compare_support(extra.theta, truth);
    CHECK(c.matched.size() == 3);
    CHECK(c.extra == std::vector<std::size_t>{*d.index_of("|x|")});
    CHECK(c.missing.empty());

    CHECK_THROWS_AS(resolve_truth(d, {{"x", 0.0}}), InputError);
    CHECK_THROWS_AS(resolve_truth(d, {{"sin(x)", 1.0}}), InputError);
    CHECK_THROWS_AS(resolve_truth(d, {{"x", 1.0}, {"x", 2.0}}), InputError);

    Population pop = from_losses({1, 2, 3, 4});
    pop.particles[0].theta << 0, 1;
    pop.particles[1].theta << 0, 2;
    const Vector ip = inclusion_probability(pop);
    CHECK(ip[0] == 0.5);
    CHECK(ip[1] == 1.0);
}

TEST_CASE("per-round overrides and validation")
{
    SabcConfig cfg;
    cfg.rounds = {RoundSettings{1e5, 0.005, 0.05, std::nullopt}, RoundSettings{20, 1e-5, 0.5, 2.0}};
    const SabcConfig r2 = cfg.for_round(1);
    CHECK(r2.epsilon1 == 20);
    CHECK(r2.epsilon_tol == 1e-5);
    CHECK(r2.beta == 0.5);
    CHECK(r2.gamma == 2.0);
    CHECK(cfg.for_round(0).gamma == cfg.gamma);
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.dropped_count() == 20);

    cfg.alpha = 0.29;
    cfg.n_particles = 100;
    CHECK(cfg.dropped_count() == 29);

    SabcConfig bad;
    bad.alpha = 0.001;
    bad.n_particles = 10;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = SabcConfig{};
    bad.rounds = {};
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = SabcConfig{};
    bad.rounds = {RoundSettings{-1.0, std::nullopt, std::nullopt, std::nullopt}};
    CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("small two-round run")
{
    spdlog::set_level(spdlog::level::warn);
    const Dataset ds = generate_benchmark("linear", 0.02, 5);
    const Dictionary d = oscillator21();
    const SabcConfig cfg = small_config();
    const TruthModel truth = resolve_truth(d, benchmark("linear").truth);

    const int before = omp_get_max_threads();
    omp_set_num_threads(1);
    const RunReport a = run(ds, d, cfg, truth);
    omp_set_num_threads(3);
    const RunReport b = run(ds, d, cfg, truth);
    omp_set_num_threads(before);

    // thresholds never increase within a round
    for (std::size_t i = 1; i < a.populations.size(); ++i) {
        if (a.populations[i].round == a.populations[i - 1].round) {
            CHECK(a.populations[i].epsilon <= a.populations[i - 1].epsilon);
        }
    }
    CHECK(a.rounds.size() == 2);
    CHECK(a.rounds[1].gamma == 2.0);
    CHECK(a.populations.back().kprime == std::nullopt);

    // the final population respects its threshold
    CHECK(a.final.size() == 40);
    for (const auto& p : a.final.particles) CHECK(p.loss.total < a.final.epsilon);
    CHECK(a.best.loss.total == a.final.particles[a.final.best_index()].loss.total);
    CHECK(a.delta1.has_value());
    CHECK(a.delta2.has_value());

    // identical results for any thread count
    CHECK(a.best.theta.cwiseEqual(b.best.theta).all());
    REQUIRE(a.populations.size() == b.populations.size());
    for (std::size_t i = 0; i < a.populations.size(); ++i) {
        CHECK(a.populations[i].epsilon == b.populations[i].epsilon);
        CHECK(a.populations[i].draws == b.populations[i].draws);
    }
    for (std::size_t i = 0; i < a.final.size(); ++i) {
        CHECK(a.final.particles[i].theta.cwiseEqual(b.final.particles[i].theta).all());
    }
}
