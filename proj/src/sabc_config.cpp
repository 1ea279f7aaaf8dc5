#include "sabc/sabc_config.hpp"

#include <cmath>

namespace sabc {

void SabcConfig::validate() const
{
    if (n_particles < 1) throw InputError("N_S must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    if (dropped_count() < 1) throw InputError("alpha * N_S must be >= 1");
    if (!(eta >= 0.0 && eta <= 1.0)) throw InputError("eta must lie in [0, 1]");
    if (k_max < 1) throw InputError("K_max must be >= 1");
    if (prior.scheme == PriorSpec::Scheme::uniform && !(prior.a > 0.0)) throw InputError("prior half-width a must be > 0");
    if (max_draws < 1) throw InputError("max_draws must be >= 1");
    if (em.restarts < 1 || em.max_iter < 1 || !(em.tol > 0.0) || !(em.ridge_rel > 0.0)) {
        throw InputError("em settings must be positive");
    }
    sim.validate();
    if (rounds.empty()) throw InputError("at least one round is required");
    for (std::size_t r = 0; r < rounds.size(); ++r) {
        const SabcConfig c = for_round(r);
        const std::string where = " (round " + std::to_string(r + 1) + ")";
        if (!(c.epsilon1 > 0.0)) throw InputError("epsilon1 must be > 0" + where);
        if (!(c.epsilon_tol > 0.0)) throw InputError("epsilon_tol must be > 0" + where);
        if (!(c.beta >= 0.0)) throw InputError("beta must be >= 0" + where);
        if (!(c.gamma > 0.0)) throw InputError("gamma must be > 0" + where);
    }
}

SabcConfig SabcConfig::for_round(std::size_t r) const
{
    SabcConfig c = *this;
    if (r < rounds.size()) {
        const RoundSettings& o = rounds[r];
        if (o.epsilon1) c.epsilon1 = *o.epsilon1;
        if (o.epsilon_tol) c.epsilon_tol = *o.epsilon_tol;
        if (o.beta) c.beta = *o.beta;
        if (o.gamma) c.gamma = *o.gamma;
    }
    return c;
}

std::size_t SabcConfig::dropped_count() const
{
    // tolerate representation error in alpha (0.29 * 100 = 28.999...)
    return static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n_particles) + 1e-9));
}

}  // namespace sabc
