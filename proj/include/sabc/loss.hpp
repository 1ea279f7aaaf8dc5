#pragma once

#include "sabc/dictionary.hpp"
#include "sabc/simulator.hpp"
#include "sabc/types.hpp"

#include <limits>
#include <optional>

namespace sabc {

/// Sparsity-regularised distance between measured and simulated acceleration.
struct LossValue {
    double total = std::numeric_limits<double>::infinity();  // nmse + beta * l0, +inf if diverged
    double nmse = std::numeric_limits<double>::infinity();
    int l0 = 0;

    bool diverged() const { return total == std::numeric_limits<double>::infinity(); }
};

/// Number of entries that are not exactly zero.
int l0_norm(const Vector& theta);

/// 100 / (m sigma^2) * sum (D*_i - D_i)^2 + beta * ||theta||_0.
/// A missing `simulated` series (divergence) gives total = +inf.
LossValue regularized_nmse(const Dataset& data, const std::optional<Vector>& simulated, double beta,
                           const Vector& theta);

/// Simulates theta and scores it against `data` in one pass.
///
/// The running loss only grows, so integration stops as soon as it reaches
/// `bound`; in that case nullopt is returned (the particle would be rejected by
/// any acceptance test `total < bound`). Divergence also yields nullopt. When a
/// value is returned it is bit-identical to regularized_nmse on the full series.
std::optional<LossValue> score_particle(const Dataset& data, const Dictionary& dict, const Vector& theta, double beta,
                                        const SimOptions& opts,
                                        double bound = std::numeric_limits<double>::infinity());

}  // namespace sabc
