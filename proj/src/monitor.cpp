#include "qdet/monitor.hpp"

#include <algorithm>
#include <cmath>

namespace qdet {

namespace {

// splitmix64: a counter-based generator, so sample n of stream `seed` is a
// pure function of (seed, n) and reproducible under any scheduling.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d4a68b021e4d2dull;
        return z ^ (z >> 31);
    }
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
};

void check_dims(const Hamiltonian& h, const StateVector& d, const StateVector& psi) {
    if (d.dim() != h.dim() || psi.dim() != h.dim())
        throw ValidationError("state dimensions do not match the Hamiltonian");
}

}  // namespace

Matrix propagator(const Spectrum& spec, double tau) {
    const int n = spec.dim();
    Vector phases(n);
    for (int i = 0; i < n; ++i) {
        const double angle = -spec.eigenvalues()(i) * tau;
        phases(i) = Complex(std::cos(angle), std::sin(angle));
    }
    return spec.eigenvectors() * phases.asDiagonal() * spec.eigenvectors().adjoint();
}

Matrix propagator(const Hamiltonian& h, double tau) {
    return propagator(eigendecompose(h), tau);
}

StateVector MonitoringRun::survival_state() const {
    const double n = survival_raw.norm();
    if (n <= 1e-15)
        throw DegeneracyError("walker fully detected; no survival state remains");
    return StateVector(survival_raw / n);
}

MonitoringRun first_detection_amplitudes(const Hamiltonian& h, double tau,
                                         const StateVector& d, const StateVector& psi_in,
                                         int n_max) {
    check_dims(h, d, psi_in);
    if (n_max < 0)
        throw ValidationError("attempt count must be nonnegative");

    const Matrix u = propagator(h, tau);
    const Vector& dv = d.amplitudes();

    MonitoringRun run;
    run.tau = tau;
    run.amplitudes.reserve(n_max);
    run.cumulative.reserve(n_max);
    run.survival_norm_sq.reserve(n_max);

    Vector v = psi_in.amplitudes();
    double p = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        Vector w = u * v;
        const Complex phi = dv.dot(w);
        v = w - dv * phi;  // undetected branch, unnormalized
        p += std::norm(phi);
        run.amplitudes.push_back(phi);
        run.cumulative.push_back(p);
        run.survival_norm_sq.push_back(v.squaredNorm());
    }
    run.survival_raw = std::move(v);
    return run;
}

MonitoringRun run_to_convergence(const Hamiltonian& h, double tau,
                                 const StateVector& d, const StateVector& psi_in,
                                 double increment_tol, std::int64_t n_cap) {
    check_dims(h, d, psi_in);
    if (increment_tol <= 0.0)
        throw ValidationError("increment tolerance must be positive");
    if (n_cap < 1)
        throw ValidationError("attempt cap must be positive");

    const Matrix u = propagator(h, tau);
    const Vector& dv = d.amplitudes();
    const int window = 4 * h.dim();

    MonitoringRun run;
    run.tau = tau;

    Vector v = psi_in.amplitudes();
    double p = 0.0;
    int quiet = 0;  // consecutive attempts with increment below tolerance
    for (std::int64_t n = 1; n <= n_cap; ++n) {
        Vector w = u * v;
        const Complex phi = dv.dot(w);
        v = w - dv * phi;
        const double inc = std::norm(phi);
        p += inc;
        run.amplitudes.push_back(phi);
        run.cumulative.push_back(p);
        run.survival_norm_sq.push_back(v.squaredNorm());
        quiet = inc < increment_tol ? quiet + 1 : 0;
        if (quiet >= window) {
            run.converged = true;
            break;
        }
    }
    run.survival_raw = std::move(v);

    double recent_max = 0.0;
    const int steps = run.steps();
    for (int i = std::max(0, steps - window); i < steps; ++i)
        recent_max = std::max(recent_max, std::norm(run.amplitudes[i]));
    run.tail_estimate = double(window) * recent_max;
    return run;
}

TrajectoryResult trajectory_sample(const Hamiltonian& h, double tau,
                                   const StateVector& d, const StateVector& psi_in,
                                   std::uint64_t seed, std::int64_t n_cap) {
    check_dims(h, d, psi_in);
    if (n_cap < 1)
        throw ValidationError("attempt cap must be positive");

    const Matrix u = propagator(h, tau);
    const Vector& dv = d.amplitudes();
    SplitMix64 rng(seed);

    Vector psi = psi_in.amplitudes();
    for (std::int64_t n = 1; n <= n_cap; ++n) {
        Vector w = u * psi;
        const Complex phi = dv.dot(w);
        const double p_click = std::norm(phi);
        if (rng.uniform() < p_click) return TrajectoryResult{true, n};
        psi = w - dv * phi;
        const double norm = psi.norm();
        if (norm == 0.0)  // only reachable when p_click was exactly 1
            throw DegeneracyError("undetected branch has zero amplitude");
        psi /= norm;
    }
    return TrajectoryResult{false, 0};
}

}  // namespace qdet
