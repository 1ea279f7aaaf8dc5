#include "sabc/simulator.hpp"

#include "sabc/random.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>

namespace sabc {

double population_variance(const Vector& v)
{
    if (v.size() == 0) return 0.0;
    const double mean = v.mean();
    return (v.array() - mean).square().sum() / static_cast<double>(v.size());
}

void SimOptions::validate() const
{
    if (substeps < 1) throw InputError("substeps must be >= 1");
    if (!(blowup > 0.0)) throw InputError("blowup guard must be > 0");
}

int default_substeps(double dt) { return dt > 5e-3 ? 10 : 1; }

Dataset::Dataset(Vector t, Vector acc, double x0, double v0, double noise_pct)
    : t_(std::move(t)), acc_(std::move(acc)), x0_(x0), v0_(v0), noise_pct_(noise_pct)
{
    if (t_.size() != acc_.size()) throw InputError("dataset t and acc lengths differ");
    if (t_.size() < 2) throw InputError("dataset needs at least 2 samples");
    if (!t_.allFinite() || !acc_.allFinite()) throw InputError("dataset contains non-finite values");
    if (!std::isfinite(x0_) || !std::isfinite(v0_)) throw InputError("dataset initial conditions must be finite");
    if (noise_pct_ < 0.0) throw InputError("noise_pct must be >= 0");

    const Eigen::Index m = t_.size();
    dt_ = (t_[m - 1] - t_[0]) / static_cast<double>(m - 1);
    if (!(dt_ > 0.0)) throw InputError("dataset times must be strictly increasing");
    for (Eigen::Index i = 1; i < m; ++i) {
        const double d = t_[i] - t_[i - 1];
        if (std::abs(d - dt_) > 1e-9 * dt_ + 1e-12 * std::abs(t_[i])) {
            throw InputError("dataset times are not uniformly spaced (row " + std::to_string(i) + ")");
        }
    }
    const double lead = t_[0] / dt_;
    const double lead_round = std::round(lead);
    if (lead_round < 0.0 || std::abs(lead - lead_round) > 1e-6) {
        throw InputError("first sample time must be a nonnegative multiple of dt (initial state is at t = 0)");
    }
    lead_ = static_cast<std::size_t>(lead_round);
    sigma2_ = population_variance(acc_);
}

std::optional<Vector> simulate_acceleration(const Dictionary& dict, const Vector& theta, double x0, double v0,
                                            double dt, std::size_t lead, std::size_t m, const SimOptions& opts)
{
    opts.validate();
    SparseModel model(dict, theta);
    Vector out(static_cast<Eigen::Index>(m));
    auto status = integrate_rk4<double>(model, x0, v0, dt, lead, m, opts, [&](std::size_t i, double a, double, double) {
        out[static_cast<Eigen::Index>(i)] = a;
        return true;
    });
    if (status != SimStatus::completed) return std::nullopt;
    return out;
}

std::optional<Vector> simulate_acceleration(const Dictionary& dict, const Vector& theta, const Dataset& grid,
                                            const SimOptions& opts)
{
    return simulate_acceleration(dict, theta, grid.x0(), grid.v0(), grid.dt(), grid.lead(), grid.size(), opts);
}

std::optional<Matrix> simulate_states(const Dictionary& dict, const Vector& theta, double x0, double v0, double dt,
                                      std::size_t lead, std::size_t m, const SimOptions& opts)
{
    opts.validate();
    SparseModel model(dict, theta);
    Matrix out(static_cast<Eigen::Index>(m), 2);
    auto status = integrate_rk4<double>(model, x0, v0, dt, lead, m, opts, [&](std::size_t i, double, double x, double v) {
        out(static_cast<Eigen::Index>(i), 0) = x;
        out(static_cast<Eigen::Index>(i), 1) = v;
        return true;
    });
    if (status != SimStatus::completed) return std::nullopt;
    return out;
}

Matrix reference_states(const Dictionary& dict, const Vector& theta, double x0, double v0, const Vector& times,
                        double tol)
{
    namespace odeint = boost::numeric::odeint;
    using State = std::array<double, 2>;

    SparseModel model(dict, theta);
    auto rhs = [&](const State& s, State& ds, double) {
        ds[0] = s[1];
        ds[1] = model(s[0], s[1]);
    };

    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(times.size()) + 1);
    const bool prepend = times.size() == 0 || times[0] > 0.0;
    if (prepend) grid.push_back(0.0);
    for (Eigen::Index i = 0; i < times.size(); ++i) grid.push_back(times[i]);

    Matrix out(times.size(), 2);
    State s{x0, v0};
    std::size_t seen = 0;
    auto observer = [&](const State& st, double) {
        if (prepend && seen == 0) {
            ++seen;
            return;
        }
        const auto row = static_cast<Eigen::Index>(seen - (prepend ? 1 : 0));
        out(row, 0) = st[0];
        out(row, 1) = st[1];
        ++seen;
    };
    const double h0 = grid.size() > 1 ? (grid[1] - grid[0]) / 10.0 : 1e-3;
    odeint::integrate_times(odeint::make_dense_output(tol, tol, odeint::runge_kutta_dopri5<State>()), rhs, s,
                            grid.begin(), grid.end(), h0, observer);
    return out;
}

Vector add_noise(const Vector& acc, double noise_pct, std::uint64_t seed)
{
    if (noise_pct < 0.0) throw InputError("noise_pct must be >= 0");
    if (noise_pct == 0.0) return acc;
    const double sd = noise_pct * population_std(acc);
    Rng rng(stream_seed(seed, {0x6e6f697365ULL}));
    std::normal_distribution<double> normal(0.0, sd);
    Vector out = acc;
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += normal(rng);
    return out;
}

Dictionary Benchmark::truth_dictionary() const
{
    std::vector<std::string> labels;
    for (const auto& [l, c] : truth) labels.push_back(l);
    return Dictionary::from_labels(labels);
}

Vector Benchmark::truth_theta() const
{
    Vector th(static_cast<Eigen::Index>(truth.size()));
    for (std::size_t i = 0; i < truth.size(); ++i) th[static_cast<Eigen::Index>(i)] = truth[i].second;
    return th;
}

Benchmark benchmark(std::string_view name)
{
    if (name == "pendulum") return {"pendulum", {{"1", 0.4}, {"xd", -0.5}, {"sin(x)", -1.0}}, 0.0, 0.0, 10.0 / 300.0, 300};
    if (name == "linear") return {"linear", {{"x", -500.0}, {"xd", -0.5}}, 0.1, 0.0, 1e-3, 1000};
    if (name == "duffing") return {"duffing", {{"x", -500.0}, {"xd", -0.5}, {"x^3", -50000.0}}, 0.1, 0.0, 1e-3, 1000};
    if (name == "viscous") return {"viscous", {{"x", -500.0}, {"xd", -0.5}, {"xd|xd|", -0.8}}, 0.1, 0.0, 1e-3, 1000};
    throw InputError("unknown benchmark '" + std::string(name) + "'");
}

std::vector<std::string> benchmark_names() { return {"pendulum", "linear", "duffing", "viscous"}; }

Dataset generate_benchmark(std::string_view name, double noise_pct, std::uint64_t seed)
{
    if (noise_pct < 0.0) throw InputError("noise_pct must be >= 0");
    const Benchmark b = benchmark(name);
    const Dictionary dict = b.truth_dictionary();
    const Vector theta = b.truth_theta();

    Vector t(static_cast<Eigen::Index>(b.samples));
    for (std::size_t i = 0; i < b.samples; ++i) t[static_cast<Eigen::Index>(i)] = static_cast<double>(i + 1) * b.dt;

    const Matrix states = reference_states(dict, theta, b.x0, b.v0, t, 1e-9);
    Vector acc(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) acc[i] = dict.predicted_acceleration(theta, states(i, 0), states(i, 1));

    Dataset ds(t, add_noise(acc, noise_pct, seed), b.x0, b.v0, noise_pct);
    ds.seed = seed;
    ds.truth_name = b.name;
    ds.truth_coefficients = b.truth;
    return ds;
}

}  // namespace sabc
