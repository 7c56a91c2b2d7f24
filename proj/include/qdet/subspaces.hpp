#pragma once

#include <optional>
#include <vector>

#include "qdet/graph.hpp"
#include "qdet/types.hpp"

namespace qdet {

enum class SubspaceKind { Bright, Dark };

// How a basis was obtained.  Krylov iteration on H or on U(tau), or the
// per-level projection of the detector state onto eigenspaces.
enum class Construction { KrylovH, KrylovU, Spectral };

enum class KrylovMode { PowerH, PowerU };

// Orthonormal basis of a detector-induced subspace.  Columns of `matrix()`
// are the basis vectors; the basis may be empty (dimension 0).
class SubspaceBasis {
public:
    SubspaceBasis(SubspaceKind kind, Construction construction, Matrix vectors,
                  std::optional<double> tau = std::nullopt);

    SubspaceKind kind() const { return kind_; }
    Construction construction() const { return construction_; }
    std::optional<double> tau() const { return tau_; }

    int ambient_dim() const { return static_cast<int>(vectors_.rows()); }
    int size() const { return static_cast<int>(vectors_.cols()); }
    const Matrix& matrix() const { return vectors_; }
    Vector vector(int i) const { return vectors_.col(i); }

    Matrix projector() const;  // sum of |b_i><b_i|

private:
    SubspaceKind kind_;
    Construction construction_;
    Matrix vectors_;
    std::optional<double> tau_;
};

struct DetectionResult {
    double p_det;
    SubspaceKind basis_kind;      // bright sum or dark complement
    Construction construction;
    int basis_size;
};

// Basis-vector phase convention: the first component above noise level is
// rotated onto the positive real axis, so bases are reproducible run to run.
void fix_phase(Eigen::Ref<Vector> v);

// Modified Gram-Schmidt with one reorthogonalization pass.  A candidate is
// dropped when its residual after projection falls below rank_tol times its
// original norm.  Kept vectors follow the fix_phase convention.
std::vector<Vector> gram_schmidt(const std::vector<Vector>& raw,
                                 double rank_tol = tol::rank);

// Krylov basis of span{d, M d, M^2 d, ...} with M = H or M = U(tau); stops
// at the first rank-stagnant step (the span is then M-invariant) or at the
// ambient dimension.  U mode requires tau.
SubspaceBasis krylov_bright_basis(const Hamiltonian& h, const StateVector& d,
                                  KrylovMode mode, double rank_tol = tol::rank,
                                  std::optional<double> tau = std::nullopt);

// Orthonormal basis of the orthogonal complement of a bright basis.
SubspaceBasis dark_complement(const SubspaceBasis& bright);

// Total detection probability: sum of |<b|psi>|^2 over a bright basis, or
// one minus the same sum over a dark basis.  The two routes agree for
// complementary bases.
DetectionResult detection_probability_exact(const SubspaceBasis& basis,
                                            const StateVector& psi_in);

// Closed form for the odd line L = 2k+1 with the detector on site 2 (in the
// 1-based line labelling): k/(k+1) from odd-labelled sites, 1 from even.
double segment_formula(int k, int r);

}  // namespace qdet
