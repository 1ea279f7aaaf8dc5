#pragma once

#include "sabc/dictionary.hpp"
#include "sabc/loss.hpp"
#include "sabc/random.hpp"
#include "sabc/sabc_config.hpp"
#include "sabc/simulator.hpp"

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace sabc {

/// Per-coordinate uniform slab U(lo_i, hi_i).
struct SlabPrior {
    Vector lo;
    Vector hi;

    SlabPrior(Vector lo, Vector hi);
    Eigen::Index dim() const { return lo.size(); }
    Vector half_widths() const { return (hi - lo) / 2.0; }
    Vector sample(Rng& rng) const;
};

/// U(-a, a) everywhere, or the informed prior: a = 100 * 10^k on x^k, 1 elsewhere.
SlabPrior slab_bounds_for(const Dictionary& dict, const PriorSpec& scheme);

/// Resolved magnitude thresholds for a dictionary.
Vector resolve_lambda(const Dictionary& dict, const PriorSpec& prior, const LambdaSpec& spec);

/// Each coordinate set to exactly 0 when its uniform draw exceeds eta.
Vector apply_spike(Vector theta, double eta, Rng& rng);

/// theta_i = 0 where |theta_i| <= lambda_i.
Vector apply_threshold(Vector theta, const Vector& lambda);

struct Particle {
    Vector theta;
    LossValue loss;
};

struct Population {
    std::vector<Particle> particles;
    double epsilon = 0.0;  // every member has loss.total < epsilon

    std::size_t size() const { return particles.size(); }
    std::vector<double> losses() const;
    std::size_t best_index() const;
};

struct AcceptanceStats {
    std::uint64_t draws = 0;
    std::size_t accepted = 0;
    double rate() const { return draws ? static_cast<double>(accepted) / static_cast<double>(draws) : 0.0; }
};

/// Draws `rng -> theta` candidates until `need` of them score below `bound`.
///
/// Draw k uses its own stream make_stream(seed, {stage..., k}); candidates are
/// scored in parallel batches whose sizes depend only on how many acceptances are
/// still missing, and accepted in draw order, so the result does not depend on the
/// number of worker threads. Throws SamplerError once `max_draws` is exceeded.
using Proposal = std::function<Vector(Rng&)>;
std::vector<Particle> accept_particles(const Dataset& data, const Dictionary& dict, const Proposal& propose,
                                       std::size_t need, double bound, double beta, const SimOptions& sim,
                                       std::uint64_t seed, std::pair<std::uint64_t, std::uint64_t> stage,
                                       std::uint64_t max_draws, AcceptanceStats* stats = nullptr);

/// Alg. 1: uniform slab, spike, threshold, accept below cfg.epsilon1 with cfg.beta.
Population generate_initial_population(const Dataset& data, const Dictionary& dict, const SabcConfig& cfg,
                                       std::uint64_t stage = 0, AcceptanceStats* stats = nullptr);

}  // namespace sabc
