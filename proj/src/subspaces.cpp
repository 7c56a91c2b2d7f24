#include "qdet/subspaces.hpp"

#include <algorithm>
#include <cmath>

#include "qdet/monitor.hpp"

namespace qdet {

// Vectors here are unit norm, so the 1e-9 threshold means "first component
// that is not numerical noise".
void fix_phase(Eigen::Ref<Vector> v) {
    for (int i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > 1e-9) {
            v *= std::conj(v(i)) / a;
            return;
        }
    }
}

namespace {

// Two-pass modified Gram-Schmidt projection of v against the columns of
// basis; returns the residual in place.
void project_out(const Matrix& basis, int count, Vector& v) {
    for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i < count; ++i)
            v -= basis.col(i) * basis.col(i).dot(v);
}

}  // namespace

SubspaceBasis::SubspaceBasis(SubspaceKind kind, Construction construction,
                             Matrix vectors, std::optional<double> tau)
    : kind_(kind), construction_(construction), vectors_(std::move(vectors)), tau_(tau) {
    if (vectors_.rows() == 0)
        throw ValidationError("subspace basis needs a positive ambient dimension");
}

Matrix SubspaceBasis::projector() const {
    if (size() == 0) return Matrix::Zero(ambient_dim(), ambient_dim());
    return vectors_ * vectors_.adjoint();
}

std::vector<Vector> gram_schmidt(const std::vector<Vector>& raw, double rank_tol) {
    std::vector<Vector> basis;
    if (raw.empty()) return basis;
    const auto dim = raw.front().size();
    Matrix cols(dim, raw.size());
    int count = 0;
    for (const auto& candidate : raw) {
        if (candidate.size() != dim)
            throw ValidationError("gram_schmidt input vectors differ in dimension");
        const double orig = candidate.norm();
        Vector v = candidate;
        project_out(cols, count, v);
        const double res = v.norm();
        if (res <= rank_tol * orig) continue;  // linearly dependent, drop
        v /= res;
        fix_phase(v);
        cols.col(count++) = v;
    }
    basis.reserve(count);
    for (int i = 0; i < count; ++i) basis.push_back(cols.col(i));
    return basis;
}

SubspaceBasis krylov_bright_basis(const Hamiltonian& h, const StateVector& d,
                                  KrylovMode mode, double rank_tol,
                                  std::optional<double> tau) {
    const int dim = h.dim();
    if (d.dim() != dim)
        throw ValidationError("detector state dimension does not match Hamiltonian");
    if (mode == KrylovMode::PowerU && (!tau || *tau <= 0.0))
        throw ValidationError("Krylov iteration on the propagator needs tau > 0");

    Matrix m;
    if (mode == KrylovMode::PowerH)
        m = h.matrix();
    else
        m = propagator(h, *tau);

    // Arnoldi-style iteration: orthonormalize M applied to the newest basis
    // vector.  The span after k accepted steps equals span{d, M d, .., M^k d},
    // and the first stagnant step certifies an M-invariant subspace, so no
    // later power can add anything.
    Matrix cols(dim, dim);
    Vector v0 = d.amplitudes();
    fix_phase(v0);
    cols.col(0) = v0;
    int count = 1;
    while (count < dim) {
        Vector v = m * cols.col(count - 1);
        const double orig = v.norm();
        project_out(cols, count, v);
        const double res = v.norm();
        if (res <= rank_tol * orig) break;
        v /= res;
        fix_phase(v);
        cols.col(count++) = v;
    }
    const Construction tag =
        mode == KrylovMode::PowerH ? Construction::KrylovH : Construction::KrylovU;
    return SubspaceBasis(SubspaceKind::Bright, tag, cols.leftCols(count),
                         mode == KrylovMode::PowerU ? tau : std::nullopt);
}

SubspaceBasis dark_complement(const SubspaceBasis& bright) {
    if (bright.kind() != SubspaceKind::Bright)
        throw ValidationError("dark_complement expects a bright basis");
    const int dim = bright.ambient_dim();
    const int r = bright.size();
    Matrix dark(dim, dim - r);
    if (r == 0) {
        dark = Matrix::Identity(dim, dim);
    } else if (r < dim) {
        // The trailing columns of the Householder Q factor are an exact
        // orthonormal complement of the (already orthonormal) bright columns.
        Eigen::HouseholderQR<Matrix> qr(bright.matrix());
        Matrix q = qr.householderQ();
        dark = q.rightCols(dim - r);
        for (int i = 0; i < dark.cols(); ++i) fix_phase(dark.col(i));
    }
    return SubspaceBasis(SubspaceKind::Dark, bright.construction(), std::move(dark),
                         bright.tau());
}

DetectionResult detection_probability_exact(const SubspaceBasis& basis,
                                            const StateVector& psi_in) {
    if (psi_in.dim() != basis.ambient_dim())
        throw ValidationError("state dimension does not match basis");
    const double mass =
        basis.size() == 0 ? 0.0 : (basis.matrix().adjoint() * psi_in.amplitudes()).squaredNorm();
    double p = basis.kind() == SubspaceKind::Bright ? mass : 1.0 - mass;
    if (p < -tol::prob_clamp || p > 1.0 + tol::prob_clamp)
        throw ValidationError("detection probability escaped [0,1]; basis is not orthonormal");
    p = std::clamp(p, 0.0, 1.0);
    return DetectionResult{p, basis.kind(), basis.construction(), basis.size()};
}

double segment_formula(int k, int r) {
    if (k < 1)
        throw ValidationError("segment parameter k must be at least 1");
    const int length = 2 * k + 1;
    if (r < 1 || r > length)
        throw ValidationError("site label outside the line");
    return r % 2 == 1 ? double(k) / double(k + 1) : 1.0;
}

}  // namespace qdet
