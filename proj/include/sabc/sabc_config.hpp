#pragma once

#include "sabc/dictionary.hpp"
#include "sabc/gmm.hpp"
#include "sabc/simulator.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sabc {

/// Per-round overrides of the top-level thresholds / weights. Unset fields
/// inherit from SabcConfig; gamma is only used from round 2 on.
struct RoundSettings {
    std::optional<double> epsilon1;
    std::optional<double> epsilon_tol;
    std::optional<double> beta;
    std::optional<double> gamma;
};

/// Uniform slab used for the first population.
struct PriorSpec {
    enum class Scheme { uniform, informed };
    Scheme scheme = Scheme::uniform;
    double a = 1.0;  // half-width for Scheme::uniform
};

/// How the magnitude thresholds are chosen.
struct LambdaSpec {
    std::vector<double> values;     // explicit per-term thresholds; overrides the rest when non-empty
    double scale = 0.2;
    bool relative_to_prior = false; // lambda_i = scale * a_i instead of scale
};

struct SabcConfig {
    std::size_t n_particles = 400;  // N_S
    double alpha = 0.05;            // fraction dropped per population
    double eta = 0.9;               // keep probability of the spike coin
    double beta = 1.0;              // L0 weight
    LambdaSpec lambda;
    PriorSpec prior;
    int k_max = 5;
    double epsilon1 = 1e5;
    double epsilon_tol = 0.005;
    double gamma = 4.0;
    std::vector<RoundSettings> rounds{RoundSettings{}};
    std::uint64_t seed = 0;
    std::uint64_t max_draws = 10'000'000;  // per population
    EmOptions em;
    SimOptions sim;

    /// Throws InputError on an unusable configuration.
    void validate() const;

    /// Top-level fields with round r's overrides applied (r is 0-based).
    SabcConfig for_round(std::size_t r) const;

    /// Number of particles dropped per population, floor(alpha N_S).
    std::size_t dropped_count() const;
};

}  // namespace sabc
