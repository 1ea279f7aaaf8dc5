#include "sabc/sabc.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

namespace sabc {

namespace {

constexpr std::uint64_t kMixtureStream = 0x676d6dULL;

double median(std::vector<double> v)
{
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

PopulationSummary summarize(const Population& pop, int round, int index, const AcceptanceStats& stats)
{
    const auto losses = pop.losses();
    PopulationSummary s;
    s.round = round;
    s.population = index;
    s.epsilon = pop.epsilon;
    s.min_loss = *std::min_element(losses.begin(), losses.end());
    s.median_loss = median(losses);
    s.draws = stats.draws;
    s.accepted = stats.accepted;
    return s;
}

Matrix thetas_of(const std::vector<Particle>& particles)
{
    std::vector<Vector> rows;
    rows.reserve(particles.size());
    for (const auto& p : particles) rows.push_back(p.theta);
    return stack_rows(rows);
}

}  // namespace

double next_threshold(const std::vector<double>& losses, double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    const auto i_f = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(losses.size()) + 1e-9));
    if (i_f < 1) throw InputError("alpha * N_S must be >= 1");
    std::vector<double> finite;
    finite.reserve(losses.size());
    for (double l : losses) {
        if (std::isfinite(l)) finite.push_back(l);
    }
    if (finite.size() < i_f) {
        throw SamplerError("only " + std::to_string(finite.size()) + " finite losses, need " + std::to_string(i_f));
    }
    std::nth_element(finite.begin(), finite.begin() + static_cast<std::ptrdiff_t>(i_f - 1), finite.end(),
                     std::greater<>());
    return finite[i_f - 1];
}

std::vector<Particle> select_active(const Population& pop, double eps_next)
{
    std::vector<Particle> active;
    active.reserve(pop.size());
    for (const auto& p : pop.particles) {
        if (p.loss.total < eps_next) active.push_back(p);
    }
    if (active.empty()) {
        throw SamplerError("no particle lies strictly below the next threshold " + std::to_string(eps_next) +
                           " (all losses tied); increase epsilon_tol or try another seed");
    }
    return active;
}

RoundResult run_round(const Dataset& data, const Dictionary& dict, Population init, const SabcConfig& cfg, int round,
                      AcceptanceStats init_stats)
{
    const Vector lambda = resolve_lambda(dict, cfg.prior, cfg.lambda);
    const auto r = static_cast<std::uint64_t>(round);

    RoundResult out;
    Population pop = std::move(init);
    AcceptanceStats stats = init_stats;
    for (int p = 1;; ++p) {
        const double eps_next = next_threshold(pop.losses(), cfg.alpha);
        std::vector<Particle> active = select_active(pop, eps_next);

        PopulationSummary summary = summarize(pop, round, p, stats);
        summary.n_active = active.size();
        spdlog::info("round {} population {}: eps={:.6g} next={:.6g} min={:.6g} N_A={} draws={}", round, p,
                     pop.epsilon, eps_next, summary.min_loss, active.size(), stats.draws);

        if (p > 1 && std::abs(pop.epsilon - eps_next) < cfg.epsilon_tol) {
            out.populations.push_back(summary);
            break;
        }

        const MixtureSelection sel = select_mixture(thetas_of(active), cfg.k_max,
                                                    stream_seed(cfg.seed, {r, static_cast<std::uint64_t>(p), kMixtureStream}),
                                                    cfg.em);
        summary.kprime = sel.K;
        const Vector& w = sel.mixture.weights();
        summary.mixture_weights.assign(w.data(), w.data() + w.size());
        Eigen::Index top = 0;
        w.maxCoeff(&top);
        const Vector& mu = sel.mixture.means()[static_cast<std::size_t>(top)];
        summary.top_component_mean.assign(mu.data(), mu.data() + mu.size());
        out.populations.push_back(summary);

        const std::size_t need = cfg.n_particles - active.size();
        const GaussianMixture& mixture = sel.mixture;
        const double eta = cfg.eta;
        Proposal propose = [&](Rng& rng) { return sample_sparse_particle(mixture, eta, lambda, rng); };
        stats = {};
        std::vector<Particle> fresh = accept_particles(data, dict, propose, need, eps_next, cfg.beta, cfg.sim, cfg.seed,
                                                       {r, static_cast<std::uint64_t>(p + 1)}, cfg.max_draws, &stats);

        Population next;
        next.epsilon = eps_next;
        next.particles = std::move(active);
        next.particles.insert(next.particles.end(), std::make_move_iterator(fresh.begin()),
                              std::make_move_iterator(fresh.end()));
        pop = std::move(next);
    }
    out.final = std::move(pop);
    return out;
}

TruthModel resolve_truth(const Dictionary& dict, const std::vector<std::pair<std::string, double>>& terms)
{
    if (terms.empty()) throw InputError("truth model needs at least one term");
    TruthModel t;
    std::set<std::size_t> seen;
    for (const auto& [label, value] : terms) {
        auto idx = dict.index_of(label);
        if (!idx) throw InputError("truth term '" + label + "' is not in the dictionary");
        if (!seen.insert(*idx).second) throw InputError("truth term '" + label + "' given twice");
        if (value == 0.0 || !std::isfinite(value)) {
            throw InputError("truth coefficient of '" + label + "' must be finite and nonzero");
        }
        t.index.push_back(*idx);
        t.value.push_back(value);
    }
    return t;
}

Vector inclusion_probability(const Population& pop)
{
    if (pop.particles.empty()) throw Error("inclusion probability of an empty population");
    const Eigen::Index n = pop.particles.front().theta.size();
    Vector counts = Vector::Zero(n);
    for (const auto& p : pop.particles) counts += (p.theta.array() != 0.0).cast<double>().matrix();
    return counts / static_cast<double>(pop.size());
}

double delta1(const Particle& best, std::size_t truth_support_size)
{
    if (truth_support_size < 1) throw InputError("delta1 needs a nonempty true support");
    const double nb = static_cast<double>(truth_support_size);
    return (static_cast<double>(l0_norm(best.theta)) - nb) / nb;
}

double delta2_msre(const Vector& theta_hat, const TruthModel& truth)
{
    if (truth.size() < 1) throw InputError("delta2 needs a nonempty true support");
    double sum = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const double tv = truth.value[k];
        if (tv == 0.0) throw InputError("delta2 is undefined for a zero true coefficient");
        const double rel = (theta_hat[static_cast<Eigen::Index>(truth.index[k])] - tv) / tv;
        sum += rel * rel;
    }
    return sum / static_cast<double>(truth.size());
}

SupportComparison compare_support(const Vector& theta_hat, const TruthModel& truth)
{
    SupportComparison c;
    std::set<std::size_t> true_set(truth.index.begin(), truth.index.end());
    for (Eigen::Index i = 0; i < theta_hat.size(); ++i) {
        const auto iu = static_cast<std::size_t>(i);
        const bool in_model = theta_hat[i] != 0.0;
        const bool in_truth = true_set.count(iu) > 0;
        if (in_model && in_truth) c.matched.push_back(iu);
        else if (in_truth) c.missing.push_back(iu);
        else if (in_model) c.extra.push_back(iu);
    }
    return c;
}

RunReport run(const Dataset& data, const Dictionary& dict, const SabcConfig& cfg, const std::optional<TruthModel>& truth)
{
    cfg.validate();
    const auto started = std::chrono::steady_clock::now();

    RunReport report;
    Population previous;
    for (std::size_t ri = 0; ri < cfg.rounds.size(); ++ri) {
        const SabcConfig rc = cfg.for_round(ri);
        const int round = static_cast<int>(ri) + 1;
        const auto r = static_cast<std::uint64_t>(round);
        RoundInfo info;
        info.round = round;
        info.beta = rc.beta;
        info.epsilon1 = rc.epsilon1;
        info.epsilon_tol = rc.epsilon_tol;

        AcceptanceStats stats;
        Population init;
        if (ri == 0) {
            init = generate_initial_population(data, dict, rc, r, &stats);
        } else {
            const MixtureSelection sel = select_mixture(thetas_of(previous.particles), rc.k_max,
                                                        stream_seed(rc.seed, {r, 0, kMixtureStream}), rc.em);
            const GaussianMixture widened = inflate_covariance(sel.mixture, rc.gamma);
            const Vector lambda = resolve_lambda(dict, rc.prior, rc.lambda);
            const double eta = rc.eta;
            Proposal propose = [&](Rng& rng) { return sample_sparse_particle(widened, eta, lambda, rng); };
            init.epsilon = rc.epsilon1;
            init.particles = accept_particles(data, dict, propose, rc.n_particles, rc.epsilon1, rc.beta, rc.sim, rc.seed,
                                              {r, 1}, rc.max_draws, &stats);
            info.gamma = rc.gamma;
            info.reinit_kprime = sel.K;
        }

        RoundResult rr = run_round(data, dict, std::move(init), rc, round, stats);
        info.final_epsilon = rr.final.epsilon;
        info.populations = rr.populations.size();
        report.rounds.push_back(info);
        report.populations.insert(report.populations.end(), rr.populations.begin(), rr.populations.end());
        previous = std::move(rr.final);
        spdlog::info("round {} finished after {} populations, final eps={:.6g}", round, info.populations,
                     info.final_epsilon);
    }

    report.final = std::move(previous);
    report.best = report.final.particles[report.final.best_index()];
    report.inclusion_prob = inclusion_probability(report.final);
    if (truth) {
        report.delta1 = delta1(report.best, truth->size());
        report.delta2 = delta2_msre(report.best.theta, *truth);
    }
    report.wallclock = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

}  // namespace sabc
