#include "sabc/spike_slab.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <sstream>

namespace sabc {

SlabPrior::SlabPrior(Vector lo_, Vector hi_) : lo(std::move(lo_)), hi(std::move(hi_))
{
    if (lo.size() != hi.size()) throw InputError("slab bounds have different lengths");
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        if (!(lo[i] < hi[i])) throw InputError("slab bound " + std::to_string(i) + " has lo >= hi");
    }
}

Vector SlabPrior::sample(Rng& rng) const
{
    Vector out(lo.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = lo[i] + (hi[i] - lo[i]) * uniform01(rng);
    return out;
}

SlabPrior slab_bounds_for(const Dictionary& dict, const PriorSpec& scheme)
{
    const auto n = static_cast<Eigen::Index>(dict.size());
    Vector a(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const TermSpec& t = dict[static_cast<std::size_t>(i)];
        if (scheme.scheme == PriorSpec::Scheme::uniform) {
            a[i] = scheme.a;
        } else {
            a[i] = t.is_pure_disp_power() ? 100.0 * std::pow(10.0, t.px) : 1.0;
        }
    }
    return SlabPrior(-a, a);
}

Vector resolve_lambda(const Dictionary& dict, const PriorSpec& prior, const LambdaSpec& spec)
{
    const auto n = static_cast<Eigen::Index>(dict.size());
    if (!spec.values.empty()) {
        if (spec.values.size() != dict.size()) {
            throw InputError("lambda has " + std::to_string(spec.values.size()) + " entries, dictionary has " +
                             std::to_string(dict.size()));
        }
        Vector out = Eigen::Map<const Vector>(spec.values.data(), n);
        if ((out.array() < 0.0).any()) throw InputError("lambda entries must be >= 0");
        return out;
    }
    if (spec.scale < 0.0) throw InputError("lambda scale must be >= 0");
    if (spec.relative_to_prior) return spec.scale * slab_bounds_for(dict, prior).half_widths();
    return Vector::Constant(n, spec.scale);
}

Vector apply_spike(Vector theta, double eta, Rng& rng)
{
    if (eta < 0.0 || eta > 1.0) throw InputError("eta must lie in [0, 1]");
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        if (uniform01(rng) > eta) theta[i] = 0.0;
    }
    return theta;
}

Vector apply_threshold(Vector theta, const Vector& lambda)
{
    if (lambda.size() != theta.size()) throw InputError("lambda / theta dimension mismatch");
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        if (std::abs(theta[i]) <= lambda[i]) theta[i] = 0.0;
    }
    return theta;
}

std::vector<double> Population::losses() const
{
    std::vector<double> out;
    out.reserve(particles.size());
    for (const auto& p : particles) out.push_back(p.loss.total);
    return out;
}

std::size_t Population::best_index() const
{
    if (particles.empty()) throw Error("empty population has no best particle");
    std::size_t best = 0;
    for (std::size_t i = 1; i < particles.size(); ++i) {
        if (particles[i].loss.total < particles[best].loss.total) best = i;
    }
    return best;
}

std::vector<Particle> accept_particles(const Dataset& data, const Dictionary& dict, const Proposal& propose,
                                       std::size_t need, double bound, double beta, const SimOptions& sim,
                                       std::uint64_t seed, std::pair<std::uint64_t, std::uint64_t> stage,
                                       std::uint64_t max_draws, AcceptanceStats* stats)
{
    std::vector<Particle> accepted;
    accepted.reserve(need);
    std::uint64_t next = 0;
    std::uint64_t counted = 0;

    while (accepted.size() < need) {
        if (next >= max_draws) {
            std::ostringstream msg;
            msg << "acceptance budget of " << max_draws << " draws exhausted with " << accepted.size() << "/" << need
                << " particles below threshold " << bound << " (acceptance rate "
                << static_cast<double>(accepted.size()) / static_cast<double>(next)
                << "); the threshold is too tight or the prior is mis-scaled";
            throw SamplerError(msg.str());
        }
        const auto remaining = static_cast<std::uint64_t>(need - accepted.size());
        const std::uint64_t batch = std::min<std::uint64_t>(std::clamp<std::uint64_t>(remaining, 32, 512), max_draws - next);

        std::vector<std::optional<Particle>> slots(batch);
        std::exception_ptr failure;
        const auto nb = static_cast<long long>(batch);
#pragma omp parallel for schedule(dynamic, 1)
        for (long long i = 0; i < nb; ++i) {
            try {
                Rng rng = make_stream(seed, {stage.first, stage.second, next + static_cast<std::uint64_t>(i)});
                Vector theta = propose(rng);
                if (!theta.allFinite()) continue;
                if (auto loss = score_particle(data, dict, theta, beta, sim, bound)) {
                    slots[static_cast<std::size_t>(i)] = Particle{std::move(theta), *loss};
                }
            } catch (...) {
#pragma omp critical(sabc_accept_failure)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);

        for (std::uint64_t i = 0; i < batch && accepted.size() < need; ++i) {
            counted = next + i + 1;
            if (slots[i]) accepted.push_back(std::move(*slots[i]));
        }
        next += batch;
    }
    if (stats) {
        stats->draws = counted;
        stats->accepted = accepted.size();
    }
    return accepted;
}

Population generate_initial_population(const Dataset& data, const Dictionary& dict, const SabcConfig& cfg,
                                       std::uint64_t stage, AcceptanceStats* stats)
{
    if (!(cfg.epsilon1 > 0.0)) throw InputError("epsilon1 must be > 0");
    if (cfg.n_particles < 1) throw InputError("population size must be >= 1");
    const SlabPrior prior = slab_bounds_for(dict, cfg.prior);
    const Vector lambda = resolve_lambda(dict, cfg.prior, cfg.lambda);
    const double eta = cfg.eta;

    Proposal propose = [&](Rng& rng) {
        Vector theta = prior.sample(rng);
        theta = apply_spike(std::move(theta), eta, rng);
        return apply_threshold(std::move(theta), lambda);
    };
    Population pop;
    pop.epsilon = cfg.epsilon1;
    pop.particles = accept_particles(data, dict, propose, cfg.n_particles, cfg.epsilon1, cfg.beta, cfg.sim, cfg.seed,
                                     {stage, 0}, cfg.max_draws, stats);
    return pop;
}

}  // namespace sabc
