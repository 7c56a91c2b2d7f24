#pragma once

#include <vector>

#include "qdet/graph.hpp"
#include "qdet/subspaces.hpp"
#include "qdet/types.hpp"

namespace qdet {

// Eigenvalues grouped into a (possibly degenerate) level.
struct Level {
    double energy;             // mean of the grouped eigenvalues
    std::vector<int> indices;  // eigenvector columns belonging to the level
};

// Full Hermitian eigendecomposition with degeneracy grouping.
class Spectrum {
public:
    Spectrum(RealVector eigenvalues, Matrix eigenvectors, double group_tol);

    int dim() const { return static_cast<int>(eigenvalues_.size()); }
    const RealVector& eigenvalues() const { return eigenvalues_; }  // ascending
    const Matrix& eigenvectors() const { return eigenvectors_; }    // orthonormal columns
    const std::vector<Level>& levels() const { return levels_; }

    double spectral_radius() const;
    Matrix level_projector(int level) const;

private:
    RealVector eigenvalues_;
    Matrix eigenvectors_;
    std::vector<Level> levels_;
};

Spectrum eigendecompose(const Matrix& h);
Spectrum eigendecompose(const Hamiltonian& h);

// Regroups sorted eigenvalues into levels: adjacent gaps <= tol merge.
std::vector<Level> group_levels(const RealVector& eigenvalues, double group_tol);

struct ResonantPair {
    int level_a;
    int level_b;
    long k;           // dE * tau is within tolerance of 2*pi*k
    double residual;  // folded |dE * tau| distance from 2*pi*k
};

// Level pairs whose Bohr frequency times tau is a multiple of 2*pi.  At such
// tau the propagator cannot distinguish the levels and Krylov iteration on
// U(tau) spans less than the full bright space.
struct ResonanceReport {
    double tau = 0.0;
    std::vector<ResonantPair> pairs;
    bool resonant() const { return !pairs.empty(); }
};

ResonanceReport check_resonant_tau(const Spectrum& spec, double tau,
                                   double tolerance = tol::resonance);

// Multiplies tau by (1 + 1/997) until non-resonant; errors if a handful of
// retries cannot escape (which would indicate a pathological spectrum).
double ensure_generic_tau(const Spectrum& spec, double tau);

// Per-level split: the component of the detector state inside each
// eigenspace is bright; the rest of the eigenspace is dark.  Together the
// two bases are a complete orthonormal basis.
struct StationarySplit {
    SubspaceBasis bright;
    SubspaceBasis dark;
};

StationarySplit stationary_subspaces(const Spectrum& spec, const StateVector& d,
                                     double component_cutoff = tol::bright_component);

}  // namespace qdet
