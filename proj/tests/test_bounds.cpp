#include <doctest.h>

#include <cmath>
#include <numbers>

#include "desk.hpp"
#include "oracles.hpp"
#include "qdet/bounds.hpp"
#include "qdet/spectral.hpp"
#include "qdet/subspaces.hpp"

using namespace qdet;

namespace {

StateVector ring_dark_24() {
    Vector v = Vector::Zero(6);
    v(2) = 1.0 / std::numbers::sqrt2;
    v(4) = -1.0 / std::numbers::sqrt2;
    return StateVector(std::move(v));
}

StateVector ring_dark_15() {
    Vector v = Vector::Zero(6);
    v(1) = 1.0 / std::numbers::sqrt2;
    v(5) = -1.0 / std::numbers::sqrt2;
    return StateVector(std::move(v));
}

}  // namespace

TEST_CASE("variances of detector states") {
    const Hamiltonian ring = desk::ring6_h();
    const StateVector r0 = basis_state(6, 0);
    CHECK(variance_in_state(ring, 1, r0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(variance_in_state(ring, 2, r0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(variance_in_state(ring, 3, r0) == doctest::Approx(22.0).epsilon(1e-12));

    const Hamiltonian line = desk::line_h(5);
    const StateVector l1 = basis_state(5, desk::line_site(1));
    const StateVector l2 = basis_state(5, desk::line_site(2));
    CHECK(variance_in_state(line, 1, l1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(variance_in_state(line, 2, l1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(variance_in_state(line, 3, l1) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(variance_in_state(line, 4, l1) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(variance_in_state(line, 1, l2) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(variance_in_state(line, 2, l2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(variance_in_state(line, 3, l2) == doctest::Approx(14.0).epsilon(1e-12));

    const Hamiltonian dangling = desk::dangling_h();
    const StateVector d0 = basis_state(7, 0);
    CHECK(variance_in_state(dangling, 1, d0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(variance_in_state(dangling, 4, d0) == doctest::Approx(17.0).epsilon(1e-12));
    CHECK(variance_in_state(dangling, 5, d0) == doctest::Approx(78.0).epsilon(1e-12));

    // An eigenstate has zero variance at every power.
    const StateVector sym = uniform_state(6);  // E = 2 eigenvector of the ring
    CHECK(variance_in_state(ring, 1, sym) < 1e-12);
    CHECK(variance_in_state(ring, 3, sym) < 1e-10);

    CHECK_THROWS_AS(variance_in_state(ring, 0, r0), ValidationError);
    CHECK_THROWS_AS(variance_in_state(ring, 1, basis_state(5, 0)), ValidationError);
}

TEST_CASE("variance equals the walk-count variance on adjacency Hamiltonians") {
    const Graph graphs[] = {build_ring(6), build_dangling_bond(), build_line(5)};
    for (const auto& g : graphs) {
        const Hamiltonian h = hamiltonian_from_graph(g);
        for (int s = 1; s <= 4; ++s) {
            const long long closed_2s = oracle::count_walks_dfs(g, 0, 0, 2 * s);
            const long long closed_s = oracle::count_walks_dfs(g, 0, 0, s);
            const double expected = double(closed_2s) - double(closed_s) * double(closed_s);
            CHECK(variance_in_state(h, s, basis_state(g.node_count(), 0)) ==
                  doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("commutator bounds on the line") {
    const Hamiltonian h = desk::line_h(5);
    const StateVector d1 = basis_state(5, desk::line_site(1));
    const StateVector d2 = basis_state(5, desk::line_site(2));
    auto value = [&](const StateVector& d, int r, int s) {
        return lower_bound_commutator(h, d, basis_state(5, desk::line_site(r)), s).value;
    };
    CHECK(value(d1, 2, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(value(d1, 3, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(value(d1, 4, 3) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(value(d1, 5, 4) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(value(d2, 1, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(value(d2, 3, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(value(d2, 4, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(value(d2, 5, 3) == doctest::Approx(1.0 / 14.0).epsilon(1e-12));
}

TEST_CASE("commutator bounds on the ring") {
    const Hamiltonian h = desk::ring6_h();
    const StateVector d = basis_state(6, 0);
    CHECK(lower_bound_commutator(h, d, basis_state(6, 1), 1).value ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(lower_bound_commutator(h, d, basis_state(6, 2), 2).value ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(lower_bound_commutator(h, d, basis_state(6, 3), 3).value ==
          doctest::Approx(2.0 / 11.0).epsilon(1e-12));

    // Starting on the detector: certain detection, bound clamps to 1.
    const BoundReport ret = lower_bound_commutator(h, d, d, 3);
    CHECK(ret.value == 1.0);

    // A dark initial state yields a vacuous bound.
    const BoundReport dark = lower_bound_commutator(h, d, ring_dark_15(), 1);
    CHECK(dark.value < 1e-12);
    CHECK(dark.rhs_zero);

    // The detector must not be an eigenstate of K.
    CHECK_THROWS_AS(lower_bound_commutator(h, uniform_state(6), d, 1), DegeneracyError);
}

TEST_CASE("commutator bound fallback shift") {
    // Two-site hopper: H^2 = 1, so s = 2 needs the spectral shift.
    const Hamiltonian h = desk::line_h(2);
    const StateVector d = basis_state(2, 0);
    const StateVector psi = basis_state(2, 1);
    CHECK_THROWS_AS(lower_bound_commutator(h, d, psi, 2), DegeneracyError);

    const BoundReport shifted = lower_bound_commutator_auto(h, d, psi, 2);
    CHECK(shifted.auto_shifted);
    CHECK(shifted.shift_c == doctest::Approx(2.0));  // 1 + spectral radius
    CHECK(shifted.value == doctest::Approx(1.0).epsilon(1e-12));

    // When no fallback is needed the plain bound comes back.
    const BoundReport plain = lower_bound_commutator_auto(h, d, psi, 1);
    CHECK(!plain.auto_shifted);
    CHECK(plain.shift_c == 0.0);
    CHECK(plain.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("commutator bound is invariant under scaling and shift") {
    struct Pair { int det; int start; };
    const Pair pairs[] = {{1, 0}, {0, 3}};
    for (const auto& [det, start] : pairs) {
        const double base = lower_bound_commutator(desk::ring6_h(), basis_state(6, det),
                                                   basis_state(6, start), 1).value;
        for (double c : {2.5, 0.3}) {
            CHECK(lower_bound_commutator(desk::ring6_h(c), basis_state(6, det),
                                         basis_state(6, start), 1).value ==
                  doctest::Approx(base).epsilon(1e-10));
        }
        CHECK(lower_bound_commutator(desk::ring6_h().shifted(1.7), basis_state(6, det),
                                     basis_state(6, start), 1).value ==
              doctest::Approx(base).epsilon(1e-10));
    }
}

TEST_CASE("propagator bound") {
    const Hamiltonian ring = desk::ring6_h();
    const StateVector d = basis_state(6, 0);

    // Sandwich against the known exact value 1/2 for the 1 -> 0 transition.
    const BoundReport r = lower_bound_propagator(ring, 1.0, d, basis_state(6, 1));
    CHECK(r.value > 0.0);
    CHECK(r.value <= 0.5 + 1e-10);
    CHECK(r.tau.value() == 1.0);

    // Orthogonality precondition.
    CHECK_THROWS_AS(lower_bound_propagator(ring, 1.0, d, d), ValidationError);

    // At tau = 2 pi the ring propagator is the identity: degenerate.
    CHECK_THROWS_AS(lower_bound_propagator(ring, 2.0 * std::numbers::pi, d,
                                           basis_state(6, 1)),
                    DegeneracyError);

    // Dark start: vacuous.
    const BoundReport dark = lower_bound_propagator(ring, 1.0, d, ring_dark_15());
    CHECK(dark.value < 1e-12);
    CHECK(dark.rhs_zero);
}

TEST_CASE("propagator bound approaches the s = 1 commutator bound at small tau") {
    struct Case { Hamiltonian h; int det; int start; };
    const Case cases[] = {{desk::line_h(5), desk::line_site(1), desk::line_site(2)},
                          {desk::ring6_h(), 0, 1}};
    const double tau = 1e-3;
    for (const auto& c : cases) {
        const StateVector d = basis_state(c.h.dim(), c.det);
        const StateVector psi = basis_state(c.h.dim(), c.start);
        const double via_u = lower_bound_propagator(c.h, tau, d, psi).value;
        const double via_s = lower_bound_commutator(c.h, d, psi, 1).value;
        CHECK(std::abs(via_u - via_s) / via_s < 10.0 * tau);
    }
}

TEST_CASE("propagator bound sweep skips degenerate tau values") {
    const Hamiltonian ring = desk::ring6_h();
    const std::vector<double> taus{0.7, 1.0, 1.3, 2.0 * std::numbers::pi};
    const auto reports =
        propagator_bound_sweep(ring, basis_state(6, 0), basis_state(6, 1), taus);
    REQUIRE(reports.size() == 3);
    for (const auto& r : reports) CHECK(r.value <= 0.5 + 1e-9);
}

TEST_CASE("dark upper bound on the ring") {
    const Hamiltonian ring = desk::ring6_h();
    const StateVector psi = basis_state(6, 1);

    const BoundReport far = upper_bound_dark(ring, ring_dark_24(), psi);
    CHECK(far.value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(variance_in_state(ring, 1, ring_dark_24()) == doctest::Approx(1.0));

    const BoundReport near = upper_bound_dark(ring, ring_dark_15(), psi);
    CHECK(near.value == doctest::Approx(0.5).epsilon(1e-12));

    // Starting inside the dark state: never detected.
    CHECK(upper_bound_dark(ring, ring_dark_15(), ring_dark_15()).value < 1e-12);

    // A stationary dark state carries no information.
    Vector delta = Vector::Zero(7);
    delta(6) = 1.0;
    delta(3) = -1.0;
    delta(5) = 1.0;
    delta /= std::sqrt(3.0);
    CHECK_THROWS_AS(upper_bound_dark(desk::dangling_h(), StateVector(delta),
                                     basis_state(7, 1)),
                    DegeneracyError);
}

TEST_CASE("best dark upper bound scans a dark basis") {
    const Hamiltonian ring = desk::ring6_h();
    const StateVector d = basis_state(6, 0);
    const auto dark = dark_complement(krylov_bright_basis(ring, d, KrylovMode::PowerH));
    const auto best = best_dark_upper_bound(ring, dark, basis_state(6, 1));
    REQUIRE(best.has_value());
    CHECK(best->value == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(best->kind == BoundKind::Upper);

    // The spectral construction splits the dark space level by level, so its
    // columns are energy eigenstates and every one of them is stationary.
    const auto split = stationary_subspaces(eigendecompose(ring), d);
    CHECK(!best_dark_upper_bound(ring, split.dark, basis_state(6, 1)).has_value());

    // The dangling-bond dark space is one stationary state however it is built.
    const auto dangling_dark = dark_complement(
        krylov_bright_basis(desk::dangling_h(), basis_state(7, 0), KrylovMode::PowerH));
    CHECK(!best_dark_upper_bound(desk::dangling_h(), dangling_dark, basis_state(7, 1))
               .has_value());
}

TEST_CASE("walk counts in exact integer arithmetic") {
    const Graph ring = build_ring(6);
    CHECK(path_count(ring, 0, 0, 0) == 1);
    CHECK(path_count(ring, 1, 0, 0) == 0);
    CHECK(path_count(ring, 0, 2, 2) == 1);
    CHECK(path_count(ring, 0, 3, 3) == 2);
    CHECK(path_count(ring, 0, 0, 6) == 22);

    for (const Graph& g : {build_ring(6), build_dangling_bond()}) {
        for (int s = 0; s <= 7; ++s)
            for (int r = 0; r < g.node_count(); ++r)
                CHECK(path_count(g, r, 0, s) == oracle::count_walks_dfs(g, r, 0, s));
    }

    CHECK_THROWS_AS(path_count(ring, 0, 6, 1), ValidationError);
    CHECK_THROWS_AS(path_count(ring, 0, 0, -1), ValidationError);

    // Complete graph on 8 nodes: counts grow like 7^s and leave 64-bit range.
    std::vector<std::pair<int, int>> complete_edges;
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j) complete_edges.push_back({i, j});
    const Graph k8(8, complete_edges);
    CHECK(path_count(k8, 0, 0, 20) > 0);
    CHECK_THROWS_AS(path_count(k8, 0, 0, 30), OverflowError);
}

TEST_CASE("walk-count bound") {
    const Graph ring = build_ring(6);
    CHECK(path_count_bound(ring, 1, 0, 1).value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(path_count_bound(ring, 3, 0, 3).value ==
          doctest::Approx(2.0 / 11.0).epsilon(1e-12));

    // Nearest-neighbour form: 1 / degree of the detector node.
    const Graph dangling = build_dangling_bond();
    CHECK(path_count_bound(dangling, 1, 2, 1).value ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(path_count_bound(dangling, 1, 0, 1).value == doctest::Approx(1.0));

    const Graph line = build_line(5);
    CHECK(path_count_bound(line, 4, 0, 4).value == doctest::Approx(0.1).epsilon(1e-12));

    const BoundReport vacuous = path_count_bound(ring, 3, 0, 2);  // odd-even mismatch
    CHECK(vacuous.value == 0.0);
    CHECK(vacuous.rhs_zero);

    CHECK_THROWS_AS(path_count_bound(ring, 0, 0, 1), ValidationError);
    CHECK_THROWS_AS(path_count_bound(Graph(2, {}), 1, 0, 1), DegeneracyError);
}

TEST_CASE("walk-count bound equals the commutator bound for adjacency Hamiltonians") {
    const Graph graphs[] = {build_ring(6), build_dangling_bond(), build_line(5)};
    for (const auto& g : graphs) {
        for (double gamma : {1.0, 2.5}) {
            const Hamiltonian h = hamiltonian_from_graph(g, gamma);
            const int n = g.node_count();
            for (int r = 1; r < n; ++r) {
                for (int s = 1; s <= 5; ++s) {
                    double combinatorial = -1.0;
                    double analytic = -1.0;
                    try {
                        combinatorial = path_count_bound(g, r, 0, s).value;
                        analytic = lower_bound_commutator(h, basis_state(n, 0),
                                                          basis_state(n, r), s).value;
                    } catch (const DegeneracyError&) {
                        continue;
                    }
                    CHECK(std::abs(combinatorial - analytic) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("s sweep reproduces the dangling-bond table") {
    const Hamiltonian h = desk::dangling_h();
    const StateVector d = basis_state(7, 0);
    const SweepResult sweep = sweep_s(h, d, uniform_state(7), 5);
    REQUIRE(sweep.entries.size() == 5);
    const double expected[] = {2.0 / 7.0, 2.0 / 7.0, 11.0 / 21.0, 42.0 / 119.0,
                               167.0 / 273.0};
    for (int s = 1; s <= 5; ++s) {
        REQUIRE(sweep.entries[s - 1].ok);
        CHECK(sweep.entries[s - 1].value ==
              doctest::Approx(expected[s - 1]).epsilon(1e-12));
    }
    CHECK(sweep.best_s == 5);
    CHECK(sweep.best_value == doctest::Approx(167.0 / 273.0).epsilon(1e-12));
}

TEST_CASE("s sweep from the far end of the dangling bond") {
    const Hamiltonian h = desk::dangling_h();
    const SweepResult sweep = sweep_s(h, basis_state(7, 0), basis_state(7, 5), 5);
    for (int s = 1; s <= 4; ++s) {
        CHECK(sweep.entries[s - 1].value < 1e-12);
        CHECK(sweep.entries[s - 1].rhs_zero);
    }
    CHECK(sweep.entries[4].value == doctest::Approx(1.0 / 78.0).epsilon(1e-12));
    CHECK(sweep.best_s == 5);
}

TEST_CASE("default sweep saturates with odd-even oscillation") {
    const Hamiltonian h = desk::dangling_h();
    const SweepResult sweep = sweep_s(h, basis_state(7, 0), uniform_state(7));
    CHECK(sweep.entries.size() == 28);  // 4 * dim
    CHECK(sweep.saturated);
    CHECK(sweep.oscillating);

    // The sweep's best never exceeds the exact answer.
    CHECK(sweep.best_value <= 20.0 / 21.0 + 1e-9);
}

TEST_CASE("sweep best stays below the exact detection probability") {
    std::mt19937 rng(83);
    for (int trial = 0; trial < 30; ++trial) {
        const Graph g = desk::random_graph(rng, 2, 10);
        const Hamiltonian h = hamiltonian_from_graph(g);
        const int det = static_cast<int>(rng() % g.node_count());
        const StateVector d = basis_state(g.node_count(), det);
        const StateVector psi = desk::random_state(rng, g.node_count());

        const double exact = detection_probability_exact(
            krylov_bright_basis(h, d, KrylovMode::PowerH), psi).p_det;
        const SweepResult sweep = sweep_s(h, d, psi, 12);
        CHECK(sweep.best_value <= exact + 1e-9);
    }
}

TEST_CASE("graph distances") {
    const Graph line = build_line(5);
    CHECK(distance_s(line, desk::line_site(5), desk::line_site(1)).value() == 4);
    CHECK(distance_s(line, 2, 2).value() == 0);

    const Graph dangling = build_dangling_bond();
    CHECK(distance_s(dangling, 5, 0).value() == 5);
    CHECK(distance_s(dangling, 6, 5).value() == 4);

    const Graph split(4, {{0, 1}, {2, 3}});
    CHECK(!distance_s(split, 0, 2).has_value());
    CHECK_THROWS_AS(distance_s(line, 0, 9), ValidationError);

    CHECK(graph_diameter(line) == 4);
    CHECK(graph_diameter(build_ring(6)) == 3);
    CHECK(graph_diameter(dangling) == 5);
    CHECK(graph_diameter(split) == 1);
}

TEST_CASE("smallest informative power matches the graph distance for site pairs") {
    const Graph dangling = build_dangling_bond();
    const Hamiltonian h = hamiltonian_from_graph(dangling);
    for (int r = 1; r < 7; ++r) {
        const auto s = smallest_nonvacuous_s(h, basis_state(7, 0), basis_state(7, r), 10);
        REQUIRE(s.has_value());
        CHECK(*s == distance_s(dangling, r, 0).value());
    }
    CHECK(smallest_nonvacuous_s(h, basis_state(7, 0), uniform_state(7), 10).value() == 1);
}
