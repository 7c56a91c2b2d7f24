#include <doctest.h>

#include <cmath>
#include <numbers>

#include "desk.hpp"
#include "qdet/bounds.hpp"
#include "qdet/monitor.hpp"
#include "qdet/spectral.hpp"
#include "qdet/subspaces.hpp"

using namespace qdet;

namespace {

StateVector ring_dark_15() {
    Vector v = Vector::Zero(6);
    v(1) = 1.0 / std::numbers::sqrt2;
    v(5) = -1.0 / std::numbers::sqrt2;
    return StateVector(std::move(v));
}

double exact_p_det(const Hamiltonian& h, const StateVector& d, const StateVector& psi) {
    return detection_probability_exact(krylov_bright_basis(h, d, KrylovMode::PowerH), psi)
        .p_det;
}

}  // namespace

TEST_CASE("propagator basics") {
    const Hamiltonian h = desk::line_h(5);
    const Matrix id = Matrix::Identity(5, 5);

    CHECK((propagator(h, 0.0) - id).cwiseAbs().maxCoeff() < 1e-14);

    const Matrix ua = propagator(h, 0.4);
    const Matrix ub = propagator(h, 0.9);
    const Matrix uab = propagator(h, 1.3);
    CHECK((ua * ub - uab).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((ua.adjoint() * ua - id).cwiseAbs().maxCoeff() < 1e-12);

    // Both entry points produce the same matrix.
    const Matrix via_spectrum = propagator(eigendecompose(h.matrix()), 0.4);
    CHECK((ua - via_spectrum).cwiseAbs().maxCoeff() < 1e-13);

    // Integer ring spectrum: U(2 pi) is the identity exactly.
    const Matrix u_full = propagator(desk::ring6_h(), 2.0 * std::numbers::pi);
    CHECK((u_full - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("first detection amplitudes") {
    const Hamiltonian h = desk::ring6_h();
    const StateVector d = basis_state(6, 0);
    const StateVector psi = basis_state(6, 1);
    const double tau = 1.0;

    const MonitoringRun run = first_detection_amplitudes(h, tau, d, psi, 40);
    REQUIRE(run.steps() == 40);
    CHECK(run.tau == tau);

    // The first amplitude is the plain matrix element <d|U|psi>.
    const Matrix u = propagator(h, tau);
    const Complex expected = (d.amplitudes().adjoint() * u * psi.amplitudes())(0);
    CHECK(std::abs(run.amplitudes[0] - expected) < 1e-13);

    // Cumulative detection never decreases and stays a probability.
    for (int n = 1; n < run.steps(); ++n) {
        CHECK(run.cumulative[n] >= run.cumulative[n - 1] - 1e-15);
        CHECK(run.cumulative[n] <= 1.0 + 1e-12);
    }
}

TEST_CASE("probability bookkeeping at every step") {
    struct Case { Hamiltonian h; int det; };
    const Case cases[] = {{desk::line_h(5), desk::line_site(2)},
                          {desk::ring6_h(), 0},
                          {desk::dangling_h(), 0}};
    for (const auto& c : cases) {
        const int dim = c.h.dim();
        for (double tau : {0.7, 1.0, 1.3}) {
            const MonitoringRun run = first_detection_amplitudes(
                c.h, tau, basis_state(dim, c.det), uniform_state(dim), 200);
            for (int n = 0; n < run.steps(); ++n)
                CHECK(std::abs(run.survival_norm_sq[n] + run.cumulative[n] - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("one-step detection when starting on the pulled-back detector") {
    const Hamiltonian h = desk::line_h(5);
    const double tau = 0.8;
    const Matrix u = propagator(h, tau);
    const StateVector d = basis_state(5, desk::line_site(2));
    const StateVector psi(u.adjoint() * d.amplitudes());

    const MonitoringRun run = first_detection_amplitudes(h, tau, d, psi, 5);
    CHECK(std::abs(run.amplitudes[0]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(run.cumulative[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(run.survival_norm_sq.back() < 1e-12);
    CHECK_THROWS_AS(run.survival_state(), DegeneracyError);
}

TEST_CASE("a dark start is never detected") {
    const Hamiltonian h = desk::ring6_h();
    const StateVector d = basis_state(6, 0);
    const MonitoringRun run = first_detection_amplitudes(h, 0.7, d, ring_dark_15(), 150);
    for (const Complex& phi : run.amplitudes) CHECK(std::abs(phi) < 1e-12);
    CHECK(run.p_detect() < 1e-12);

    // The undetected walker keeps circulating inside the dark subspace.
    const Matrix p_dark =
        dark_complement(krylov_bright_basis(h, d, KrylovMode::PowerH)).projector();
    const Vector v = run.survival_state().amplitudes();
    CHECK((p_dark * v - v).norm() < 1e-9);
}

TEST_CASE("convergence to the exact detection probability") {
    struct Case {
        Hamiltonian h;
        int det;
        StateVector psi;
        double expected;
    };
    const Case cases[] = {
        {desk::ring6_h(), 0, basis_state(6, 1), 0.5},
        {desk::line_h(5), desk::line_site(2), uniform_state(5), 14.0 / 15.0},
        {desk::dangling_h(), 0, uniform_state(7), 20.0 / 21.0},
        {desk::dangling_h(), 0, basis_state(7, 5), 2.0 / 3.0},
    };
    for (const auto& c : cases) {
        for (double tau : {0.7, 1.0, 1.3}) {
            const MonitoringRun run =
                run_to_convergence(c.h, tau, basis_state(c.h.dim(), c.det), c.psi);
            CHECK(run.converged);
            const double tol = std::max(1e-3, run.tail_estimate);
            CHECK(std::abs(run.p_detect() - c.expected) < tol);
        }
    }
}

TEST_CASE("estimates agree across generic sampling periods") {
    const Hamiltonian h = desk::dangling_h();
    const StateVector d = basis_state(7, 0);
    const StateVector psi = uniform_state(7);
    double reference = -1.0;
    for (double tau : {0.7, 1.0, 1.3, 2.1, 3.3}) {
        const MonitoringRun run = run_to_convergence(h, tau, d, psi);
        REQUIRE(run.converged);
        if (reference < 0.0)
            reference = run.p_detect();
        else
            CHECK(std::abs(run.p_detect() - reference) <
                  std::max(2e-3, 2.0 * run.tail_estimate));
    }
}

TEST_CASE("resonant sampling period freezes detection") {
    // At tau = 2 pi the ring propagator is the identity: the walker never
    // moves onto the detector and the run converges to zero detection even
    // though the generic-tau answer is 1/2.
    const MonitoringRun run = run_to_convergence(desk::ring6_h(), 2.0 * std::numbers::pi,
                                                 basis_state(6, 0), basis_state(6, 1));
    CHECK(run.converged);
    CHECK(run.p_detect() < 1e-12);
    CHECK(std::abs(run.survival_norm_sq.back() - 1.0) < 1e-12);
}

TEST_CASE("convergence flag reflects the cap") {
    const MonitoringRun run = run_to_convergence(desk::ring6_h(), 1.0, basis_state(6, 0),
                                                 basis_state(6, 1), 1e-12, 20);
    CHECK(!run.converged);
    CHECK(run.steps() == 20);
}

TEST_CASE("dark start converges immediately to zero") {
    const MonitoringRun run =
        run_to_convergence(desk::ring6_h(), 0.7, basis_state(6, 0), ring_dark_15());
    CHECK(run.converged);
    CHECK(run.p_detect() < 1e-12);
    CHECK(run.steps() == 24);  // exactly one quiet window, 4 * dim
}

TEST_CASE("trajectories are reproducible and respect dark states") {
    const Hamiltonian h = desk::ring6_h();
    const StateVector d = basis_state(6, 0);
    const StateVector psi = basis_state(6, 1);

    const TrajectoryResult a = trajectory_sample(h, 1.0, d, psi, 42, 10000);
    const TrajectoryResult b = trajectory_sample(h, 1.0, d, psi, 42, 10000);
    CHECK(a.detected == b.detected);
    CHECK(a.n == b.n);

    // A dark start never clicks.
    const TrajectoryResult dark = trajectory_sample(h, 1.0, d, ring_dark_15(), 7, 500);
    CHECK(!dark.detected);

    // Starting on the pulled-back detector clicks on the first attempt.
    const Matrix u = propagator(h, 1.0);
    const StateVector pulled(u.adjoint() * d.amplitudes());
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const TrajectoryResult hit = trajectory_sample(h, 1.0, d, pulled, seed, 10);
        CHECK(hit.detected);
        CHECK(hit.n == 1);
    }
}

TEST_CASE("trajectory frequencies track the exact detection probability") {
    const Hamiltonian h = desk::ring6_h();
    const StateVector d = basis_state(6, 0);
    const StateVector psi = basis_state(6, 1);
    const double exact = exact_p_det(h, d, psi);

    const int trials = 2000;
    int hits = 0;
    for (int t = 0; t < trials; ++t)
        if (trajectory_sample(h, 1.0, d, psi, 1000 + t, 2000).detected) ++hits;
    const double freq = double(hits) / trials;
    // 3 sigma for a Bernoulli(1/2) sample of this size is about 0.034.
    CHECK(std::abs(freq - exact) < 0.05);
}
