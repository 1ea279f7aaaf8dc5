#pragma once

#include "sabc/dictionary.hpp"
#include "sabc/types.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sabc {

/// Population variance (divisor m).
double population_variance(const Vector& v);
inline double population_std(const Vector& v) { return std::sqrt(population_variance(v)); }

struct SimOptions {
    int substeps = 1;      // fixed RK4 steps per output sample
    double blowup = 1e8;   // |x| or |xd| above this counts as divergence

    void validate() const;
};

/// 10 internal steps for coarse grids (dt > 5 ms), otherwise 1.
int default_substeps(double dt);

/// Measured acceleration series with the metadata needed to re-simulate it.
///
/// Samples sit on the grid t_i = (lead + i) * dt measured from t = 0, where the
/// state is (x0, v0). The variance of acc is computed once at construction.
class Dataset {
public:
    Dataset(Vector t, Vector acc, double x0, double v0, double noise_pct = 0.0);

    const Vector& t() const { return t_; }
    const Vector& acc() const { return acc_; }
    std::size_t size() const { return static_cast<std::size_t>(acc_.size()); }
    double x0() const { return x0_; }
    double v0() const { return v0_; }
    double dt() const { return dt_; }
    double sigma2() const { return sigma2_; }
    double noise_pct() const { return noise_pct_; }
    /// Number of dt steps between t = 0 and the first sample.
    std::size_t lead() const { return lead_; }

    // provenance, carried through to the sidecar file
    std::uint64_t seed = 0;
    std::string truth_name;
    std::vector<std::pair<std::string, double>> truth_coefficients;

private:
    Vector t_;
    Vector acc_;
    double x0_;
    double v0_;
    double dt_;
    double sigma2_;
    double noise_pct_;
    std::size_t lead_;
};

/// Outcome of a fixed-step integration.
enum class SimStatus { completed, diverged, stopped };

/// Classical RK4 for x' = v, v' = f(x, v), reporting f at each output sample.
///
/// `sink(i, acc_i, x_i, v_i)` is called for every sample in order and may return
/// false to stop early. Pure in its arguments.
template <typename Scalar, class Rhs, class Sink>
SimStatus integrate_rk4(const Rhs& f, Scalar x0, Scalar v0, Scalar dt, std::size_t lead, std::size_t m,
                        const SimOptions& opts, Sink&& sink)
{
    using std::abs;
    using std::isfinite;
    const Scalar h = dt / Scalar(opts.substeps);
    const Scalar half = h / Scalar(2);
    const Scalar sixth = h / Scalar(6);
    const Scalar limit(opts.blowup);
    Scalar x = x0;
    Scalar v = v0;

    auto step = [&]() {
        const Scalar a1 = f(x, v);
        const Scalar x2 = x + half * v, v2 = v + half * a1;
        const Scalar a2 = f(x2, v2);
        const Scalar x3 = x + half * v2, v3 = v + half * a2;
        const Scalar a3 = f(x3, v3);
        const Scalar x4 = x + h * v3, v4 = v + h * a3;
        const Scalar a4 = f(x4, v4);
        x += sixth * (v + Scalar(2) * v2 + Scalar(2) * v3 + v4);
        v += sixth * (a1 + Scalar(2) * a2 + Scalar(2) * a3 + a4);
    };
    auto ok = [&]() { return isfinite(x) && isfinite(v) && abs(x) <= limit && abs(v) <= limit; };

    if (!ok()) return SimStatus::diverged;
    for (std::size_t k = 0; k < lead; ++k) {
        for (int s = 0; s < opts.substeps; ++s) step();
        if (!ok()) return SimStatus::diverged;
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (i > 0) {
            for (int s = 0; s < opts.substeps; ++s) step();
            if (!ok()) return SimStatus::diverged;
        }
        const Scalar acc = f(x, v);
        if (!isfinite(acc)) return SimStatus::diverged;
        if (!sink(i, acc, x, v)) return SimStatus::stopped;
    }
    return SimStatus::completed;
}

/// Simulated acceleration at the dataset's sample times, or nullopt when the
/// trajectory diverged.
std::optional<Vector> simulate_acceleration(const Dictionary& dict, const Vector& theta, const Dataset& grid,
                                            const SimOptions& opts);
std::optional<Vector> simulate_acceleration(const Dictionary& dict, const Vector& theta, double x0, double v0,
                                            double dt, std::size_t lead, std::size_t m, const SimOptions& opts);

/// Displacement/velocity at the sample times (m x 2), nullopt on divergence.
std::optional<Matrix> simulate_states(const Dictionary& dict, const Vector& theta, double x0, double v0, double dt,
                                      std::size_t lead, std::size_t m, const SimOptions& opts);

/// States from an adaptive Dormand-Prince 4(5) integration at the given
/// absolute times (m x 2). Used for truth data and as an accuracy reference.
Matrix reference_states(const Dictionary& dict, const Vector& theta, double x0, double v0, const Vector& times,
                        double tol = 1e-9);

/// Adds N(0, (noise_pct * std(acc))^2) noise, deterministic in seed.
Vector add_noise(const Vector& acc, double noise_pct, std::uint64_t seed);

/// Ground-truth models used to validate the sampler.
struct Benchmark {
    std::string name;
    std::vector<std::pair<std::string, double>> truth;  // term label -> coefficient
    double x0 = 0.0;
    double v0 = 0.0;
    double dt = 0.0;
    std::size_t samples = 0;  // at t = dt, 2 dt, ..., samples * dt

    Dictionary truth_dictionary() const;
    Vector truth_theta() const;
};

/// "pendulum", "linear", "duffing" or "viscous".
Benchmark benchmark(std::string_view name);
std::vector<std::string> benchmark_names();

Dataset generate_benchmark(std::string_view name, double noise_pct, std::uint64_t seed);

}  // namespace sabc
