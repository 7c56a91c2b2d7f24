#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qdet {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Input that violates a documented precondition (sizes, labels, ranges,
// non-Hermitian matrices, unnormalized states).  The CLI maps this to exit
// code 2.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A quantity that is mathematically undefined for the given input (zero
// variance, vanishing denominator).  The CLI maps this to exit code 3.
class DegeneracyError : public std::runtime_error {
public:
    explicit DegeneracyError(const std::string& what) : std::runtime_error(what) {}
};

// 64-bit integer arithmetic overflowed in an exact combinatorial routine.
class OverflowError : public std::runtime_error {
public:
    explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};

namespace tol {

// Shared numerical tolerances.  Individual operations take overrides where
// the contract allows it; these are the documented defaults.
inline constexpr double hermiticity = 1e-12;
inline constexpr double state_norm = 1e-12;
inline constexpr double rank = 1e-10;          // relative Gram-Schmidt rank cutoff
inline constexpr double level_group = 1e-8;    // scaled by max(1, spectral radius)
inline constexpr double resonance = 1e-8;      // on |dE*tau| folded into [-pi, pi]
inline constexpr double bright_component = 1e-10;  // ||P_j d|| cutoff
inline constexpr double variance_floor = 1e-14;    // below this a state is an eigenstate
inline constexpr double rhs_zero = 1e-12;      // vacuous-bound threshold
inline constexpr double prob_clamp = 1e-10;    // probability consistency margin

}  // namespace tol

}  // namespace qdet
