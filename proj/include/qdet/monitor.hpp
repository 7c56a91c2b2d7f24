#pragma once

#include <cstdint>
#include <vector>

#include "qdet/graph.hpp"
#include "qdet/spectral.hpp"
#include "qdet/types.hpp"

namespace qdet {

// U(tau) = exp(-i H tau) assembled from the spectral decomposition.
Matrix propagator(const Spectrum& spec, double tau);
Matrix propagator(const Hamiltonian& h, double tau);

// Record of a stroboscopically monitored evolution: unitary step, projective
// detector query, collapse of the undetected branch, repeat.
struct MonitoringRun {
    double tau = 0.0;
    std::vector<Complex> amplitudes;       // first-detection amplitude at n = 1, 2, ...
    std::vector<double> cumulative;        // running detection probability P(n)
    std::vector<double> survival_norm_sq;  // ||v_n||^2, complements P(n) to 1
    Vector survival_raw;                   // unnormalized post-measurement state
    bool converged = false;
    double tail_estimate = 0.0;            // window * max increment over the last window

    int steps() const { return static_cast<int>(amplitudes.size()); }
    double p_detect() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
    StateVector survival_state() const;    // errors once the walker is fully detected
};

// Exactly n_max detection attempts.
MonitoringRun first_detection_amplitudes(const Hamiltonian& h, double tau,
                                         const StateVector& d, const StateVector& psi_in,
                                         int n_max);

// Runs until the increment |phi_n|^2 stays below `increment_tol` for a
// window of 4 * dim consecutive attempts, or until n_cap.
MonitoringRun run_to_convergence(const Hamiltonian& h, double tau,
                                 const StateVector& d, const StateVector& psi_in,
                                 double increment_tol = 1e-12,
                                 std::int64_t n_cap = 1000000);

struct TrajectoryResult {
    bool detected = false;
    std::int64_t n = 0;  // attempt index of the click, if any
};

// Samples one monitored trajectory: at each attempt the detector clicks with
// the conditional probability |<d|w>|^2 of the evolved survivor state.
// Deterministic for a given seed, independent of scheduling.
TrajectoryResult trajectory_sample(const Hamiltonian& h, double tau,
                                   const StateVector& d, const StateVector& psi_in,
                                   std::uint64_t seed, std::int64_t n_cap);

}  // namespace qdet
