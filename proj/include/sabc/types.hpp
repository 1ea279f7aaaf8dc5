#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace sabc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments, malformed configs or unreadable inputs.
class InputError : public Error {
public:
    using Error::Error;
};

/// The sampler could not make progress (acceptance budget, stalled thresholds).
class SamplerError : public Error {
public:
    using Error::Error;
};

/// EM could not produce a valid mixture.
class FitError : public Error {
public:
    using Error::Error;
};

}  // namespace sabc
