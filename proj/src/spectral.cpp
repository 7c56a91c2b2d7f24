#include "qdet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qdet {

Spectrum::Spectrum(RealVector eigenvalues, Matrix eigenvectors, double group_tol)
    : eigenvalues_(std::move(eigenvalues)), eigenvectors_(std::move(eigenvectors)) {
    levels_ = group_levels(eigenvalues_, group_tol);
}

double Spectrum::spectral_radius() const {
    if (dim() == 0) return 0.0;
    return std::max(std::abs(eigenvalues_(0)), std::abs(eigenvalues_(dim() - 1)));
}

Matrix Spectrum::level_projector(int level) const {
    const auto& lv = levels_.at(level);
    Matrix p = Matrix::Zero(dim(), dim());
    for (int idx : lv.indices)
        p += eigenvectors_.col(idx) * eigenvectors_.col(idx).adjoint();
    return p;
}

std::vector<Level> group_levels(const RealVector& eigenvalues, double group_tol) {
    std::vector<Level> levels;
    const int n = static_cast<int>(eigenvalues.size());
    int start = 0;
    while (start < n) {
        int stop = start + 1;
        while (stop < n && eigenvalues(stop) - eigenvalues(stop - 1) <= group_tol) ++stop;
        Level lv;
        double sum = 0.0;
        for (int i = start; i < stop; ++i) {
            lv.indices.push_back(i);
            sum += eigenvalues(i);
        }
        lv.energy = sum / double(stop - start);
        levels.push_back(std::move(lv));
        start = stop;
    }
    return levels;
}

Spectrum eigendecompose(const Matrix& h) {
    if (h.rows() != h.cols() || h.rows() == 0)
        throw ValidationError("eigendecompose needs a square non-empty matrix");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > tol::hermiticity * scale)
        throw ValidationError("eigendecompose needs a Hermitian matrix");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw DegeneracyError("eigendecomposition failed to converge");
    RealVector vals = solver.eigenvalues();
    const double radius =
        std::max(std::abs(vals(0)), std::abs(vals(vals.size() - 1)));
    const double group_tol = tol::level_group * std::max(1.0, radius);
    return Spectrum(std::move(vals), solver.eigenvectors(), group_tol);
}

Spectrum eigendecompose(const Hamiltonian& h) { return eigendecompose(h.matrix()); }

ResonanceReport check_resonant_tau(const Spectrum& spec, double tau, double tolerance) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    ResonanceReport report;
    report.tau = tau;
    const auto& levels = spec.levels();
    for (std::size_t a = 0; a < levels.size(); ++a) {
        for (std::size_t b = a + 1; b < levels.size(); ++b) {
            const double x = (levels[b].energy - levels[a].energy) * tau;
            const double folded = std::remainder(x, two_pi);
            if (std::abs(folded) <= tolerance)
                report.pairs.push_back({static_cast<int>(a), static_cast<int>(b),
                                        std::lround(x / two_pi), std::abs(folded)});
        }
    }
    return report;
}

double ensure_generic_tau(const Spectrum& spec, double tau) {
    for (int attempt = 0; attempt < 8; ++attempt) {
        if (!check_resonant_tau(spec, tau).resonant()) return tau;
        tau *= 1.0 + 1.0 / 997.0;
    }
    throw DegeneracyError("could not find a non-resonant tau near the requested value");
}

StationarySplit stationary_subspaces(const Spectrum& spec, const StateVector& d,
                                     double component_cutoff) {
    const int dim = spec.dim();
    if (d.dim() != dim)
        throw ValidationError("detector state dimension does not match spectrum");

    Matrix bright(dim, dim);
    Matrix dark(dim, dim);
    int nb = 0;
    int nd = 0;
    for (std::size_t j = 0; j < spec.levels().size(); ++j) {
        const auto& lv = spec.levels()[j];
        const int m = static_cast<int>(lv.indices.size());
        Matrix vj(dim, m);
        for (int i = 0; i < m; ++i) vj.col(i) = spec.eigenvectors().col(lv.indices[i]);
        // Coordinates of the detector component inside this eigenspace.
        Vector c = vj.adjoint() * d.amplitudes();
        const double w = c.norm();
        if (w > component_cutoff) {
            Vector b = vj * (c / w);
            b.normalize();
            bright.col(nb++) = b;
            if (m > 1) {
                // Complement of the detector direction inside the level.
                Eigen::HouseholderQR<Matrix> qr(Matrix(c / w));
                Matrix rest = qr.householderQ();
                Matrix coords = rest.rightCols(m - 1);
                Matrix dk = vj * coords;
                for (int i = 0; i < dk.cols(); ++i) dark.col(nd++) = dk.col(i);
            }
        } else {
            for (int i = 0; i < m; ++i) dark.col(nd++) = vj.col(i);
        }
    }
    for (int i = 0; i < nb; ++i) fix_phase(bright.col(i));
    for (int i = 0; i < nd; ++i) fix_phase(dark.col(i));
    return StationarySplit{
        SubspaceBasis(SubspaceKind::Bright, Construction::Spectral, bright.leftCols(nb)),
        SubspaceBasis(SubspaceKind::Dark, Construction::Spectral, dark.leftCols(nd))};
}

}  // namespace qdet
