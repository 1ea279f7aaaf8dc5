#include "sabc/loss.hpp"

namespace sabc {

namespace {

double nmse_scale(const Dataset& data)
{
    if (!(data.sigma2() > 0.0)) throw InputError("measured data has zero variance; the normalised loss is undefined");
    return 100.0 / (static_cast<double>(data.size()) * data.sigma2());
}

}  // namespace

int l0_norm(const Vector& theta) { return static_cast<int>((theta.array() != 0.0).count()); }

LossValue regularized_nmse(const Dataset& data, const std::optional<Vector>& simulated, double beta,
                           const Vector& theta)
{
    if (beta < 0.0) throw InputError("beta must be >= 0");
    const double scale = nmse_scale(data);
    LossValue out;
    out.l0 = l0_norm(theta);
    if (!simulated) return out;
    if (simulated->size() != data.acc().size()) throw InputError("simulated series length differs from data");

    double sum = 0.0;
    const Vector& acc = data.acc();
    for (Eigen::Index i = 0; i < acc.size(); ++i) {
        const double r = (*simulated)[i] - acc[i];
        sum += r * r;
    }
    out.nmse = scale * sum;
    out.total = out.nmse + beta * static_cast<double>(out.l0);
    return out;
}

std::optional<LossValue> score_particle(const Dataset& data, const Dictionary& dict, const Vector& theta, double beta,
                                        const SimOptions& opts, double bound)
{
    if (beta < 0.0) throw InputError("beta must be >= 0");
    const double scale = nmse_scale(data);
    const int l0 = l0_norm(theta);
    const double penalty = beta * static_cast<double>(l0);
    if (!(penalty < bound)) return std::nullopt;

    SparseModel model(dict, theta);
    const Vector& acc = data.acc();
    double sum = 0.0;
    auto status = integrate_rk4<double>(model, data.x0(), data.v0(), data.dt(), data.lead(), data.size(), opts,
                                        [&](std::size_t i, double a, double, double) {
                                            const double r = a - acc[static_cast<Eigen::Index>(i)];
                                            sum += r * r;
                                            return scale * sum + penalty < bound;
                                        });
    if (status != SimStatus::completed) return std::nullopt;

    LossValue out;
    out.l0 = l0;
    out.nmse = scale * sum;
    out.total = out.nmse + penalty;
    return out;
}

}  // namespace sabc
