#pragma once

#include "sabc/dictionary.hpp"
#include "sabc/gmm.hpp"
#include "sabc/sabc_config.hpp"
#include "sabc/simulator.hpp"
#include "sabc/spike_slab.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sabc {

/// The floor(alpha N)-th largest loss (1-indexed), N = losses.size().
double next_threshold(const std::vector<double>& losses, double alpha);

/// Particles with loss strictly below eps_next. Throws SamplerError when none qualify.
std::vector<Particle> select_active(const Population& pop, double eps_next);

/// Statistics of one population, in order of creation.
struct PopulationSummary {
    int round = 0;       // 1-based
    int population = 0;  // 1-based within the round
    double epsilon = 0;  // threshold the population was accepted under
    double min_loss = 0;
    double median_loss = 0;
    std::size_t n_active = 0;       // particles carried into the next population
    std::optional<int> kprime;      // mixture size used to refill; unset for the last population
    std::vector<double> mixture_weights;
    std::vector<double> top_component_mean;  // mean of the heaviest component
    std::uint64_t draws = 0;        // candidate draws spent building this population
    std::size_t accepted = 0;       // new particles among them
};

struct RoundResult {
    Population final;
    std::vector<PopulationSummary> populations;
};

/// Nested-threshold loop from an accepted initial population until two successive
/// thresholds differ by less than cfg.epsilon_tol. `cfg` is already resolved for
/// this round (see SabcConfig::for_round); `round` is 1-based.
RoundResult run_round(const Dataset& data, const Dictionary& dict, Population init, const SabcConfig& cfg, int round,
                      AcceptanceStats init_stats = {});

/// True coefficients expressed on the dictionary's indices.
struct TruthModel {
    std::vector<std::size_t> index;
    std::vector<double> value;

    std::size_t size() const { return index.size(); }
};

/// Maps term labels to dictionary indices. Throws InputError when a label is not
/// in the dictionary, is repeated, or carries a zero coefficient.
TruthModel resolve_truth(const Dictionary& dict, const std::vector<std::pair<std::string, double>>& terms);

/// Fraction of particles whose coefficient j is nonzero.
Vector inclusion_probability(const Population& pop);

/// (||theta||_0 - |support|) / |support|
double delta1(const Particle& best, std::size_t truth_support_size);

/// Mean over the true support of ((theta_hat_i - theta_i) / theta_i)^2.
double delta2_msre(const Vector& theta_hat, const TruthModel& truth);

struct SupportComparison {
    std::vector<std::size_t> matched;
    std::vector<std::size_t> missing;
    std::vector<std::size_t> extra;
};
SupportComparison compare_support(const Vector& theta_hat, const TruthModel& truth);

struct RoundInfo {
    int round = 0;
    double beta = 0;
    double epsilon1 = 0;
    double epsilon_tol = 0;
    std::optional<double> gamma;     // set for reinitialised rounds
    std::optional<int> reinit_kprime;
    double final_epsilon = 0;
    std::size_t populations = 0;
};

struct RunReport {
    Particle best;
    Vector inclusion_prob;
    std::vector<PopulationSummary> populations;  // threshold trace + per-population statistics
    std::vector<RoundInfo> rounds;
    std::optional<double> delta1;
    std::optional<double> delta2;
    Population final;  // last round's final population (not serialised)
    double wallclock = 0.0;
};

/// All rounds: Alg. 1 start, then for each further round a mixture fitted to the
/// previous final population, inflated by gamma, refills a fresh population under
/// that round's epsilon1.
RunReport run(const Dataset& data, const Dictionary& dict, const SabcConfig& cfg,
              const std::optional<TruthModel>& truth = std::nullopt);

}  // namespace sabc
