#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdet/graph.hpp"
#include "qdet/subspaces.hpp"
#include "qdet/types.hpp"

namespace qdet {

enum class BoundKind { Lower, Upper };

enum class BoundMethod {
    CommutatorS,     // detector-state uncertainty relation with K = (H + c)^s
    PropagatorTau,   // single-step propagator matrix elements at fixed tau
    PathCountS,      // combinatorial walk-count form of the s = distance bound
    DarkCommutator,  // dark-state uncertainty relation (upper bound)
};

struct BoundReport {
    BoundKind kind = BoundKind::Lower;
    BoundMethod method = BoundMethod::CommutatorS;
    double value = 0.0;  // clamped into [0, 1]
    double raw = 0.0;    // same quantity before clamping
    std::optional<int> s;
    std::optional<double> tau;
    double shift_c = 0.0;
    bool rhs_zero = false;      // the sharpening term vanished; bound is trivial
    bool auto_shifted = false;  // shift_c was picked by the degeneracy fallback
};

// Var(H^s) in a normalized state: <v|H^2s|v> - <v|H^s|v>^2, clamped at >= 0.
double variance_in_state(const Hamiltonian& h, int s, const StateVector& v);

// P_det >= |<d|psi>|^2 + |<d|[K, D]|psi>|^2 / Var(K)_d with K = (H + c)^s and
// D the detector projector.  Errors when d is an eigenstate of K.
BoundReport lower_bound_commutator(const Hamiltonian& h, const StateVector& d,
                                   const StateVector& psi_in, int s,
                                   double shift_c = 0.0);

// Same, but a degenerate variance at shift_c = 0 is retried once with
// c = 1 + spectral radius, which makes H + c positive definite.
BoundReport lower_bound_commutator_auto(const Hamiltonian& h, const StateVector& d,
                                        const StateVector& psi_in, int s);

// P_det >= |<d|U|psi>|^2 / (1 - |<d|U|d>|^2) for psi orthogonal to d.
BoundReport lower_bound_propagator(const Hamiltonian& h, double tau,
                                   const StateVector& d, const StateVector& psi_in);

// Grid sweep of the propagator bound over caller-supplied tau values;
// degenerate tau values are skipped.
std::vector<BoundReport> propagator_bound_sweep(const Hamiltonian& h,
                                                const StateVector& d,
                                                const StateVector& psi_in,
                                                const std::vector<double>& taus);

// P_det <= 1 - |<delta|psi>|^2 - |<delta|[H^s, P_delta]|psi>|^2 / Var(H^s)_delta
// for a dark state delta (caller-certified).  Errors when delta is stationary.
BoundReport upper_bound_dark(const Hamiltonian& h, const StateVector& delta,
                             const StateVector& psi_in, int s = 1);

// Strongest dark upper bound over the non-stationary vectors of a dark
// basis; empty when every dark vector is stationary (or the basis is empty).
std::optional<BoundReport> best_dark_upper_bound(const Hamiltonian& h,
                                                 const SubspaceBasis& dark,
                                                 const StateVector& psi_in, int s = 1);

// Number of s-step walks between two nodes, <r|A^s|d>, in exact 64-bit
// integer arithmetic; throws OverflowError if the count does not fit.
std::int64_t path_count(const Graph& g, int r, int d, int s);

// N_{r->d}(s)^2 / (N_{d->d}(2s) - N_{d->d}(s)^2); equals the commutator
// bound for H = gamma A between basis states.
BoundReport path_count_bound(const Graph& g, int r, int d, int s);

struct SweepEntry {
    int s = 0;
    bool ok = false;  // false when the bound was undefined at this s
    double value = 0.0;
    bool rhs_zero = false;
    double shift_c = 0.0;
    std::string error;
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    int best_s = 0;           // 0 when no s produced a defined bound
    double best_value = 0.0;
    bool saturated = false;   // running max flat over the last 2 * diameter steps
    bool oscillating = false; // tail alternates between odd and even s levels
};

// Evaluates the commutator bound for s = 1..s_max and tracks the running
// best.  s_max = 0 selects the default 4 * dim capped at 200.
SweepResult sweep_s(const Hamiltonian& h, const StateVector& d,
                    const StateVector& psi_in, int s_max = 0, double shift_c = 0.0);

// BFS graph distance; empty for disconnected pairs.  The commutator bound
// is vacuous for every s below this distance when states are node-localized.
std::optional<int> distance_s(const Graph& g, int r, int d);

// Smallest s with a defined, non-vacuous commutator bound; empty if none
// up to s_max.  Kept separate from distance_s: they coincide for localized
// states on pure adjacency Hamiltonians but not in general.
std::optional<int> smallest_nonvacuous_s(const Hamiltonian& h, const StateVector& d,
                                         const StateVector& psi_in, int s_max);

// Largest finite BFS eccentricity (ignores unreachable pairs).
int graph_diameter(const Graph& g);

}  // namespace qdet
