#pragma once

// Shared fixtures: the three worked systems plus seeded random graphs and
// states for property tests.

#include <random>
#include <utility>
#include <vector>

#include "qdet/graph.hpp"

namespace desk {

inline qdet::Hamiltonian line_h(int length, double gamma = 1.0) {
    return qdet::hamiltonian_from_graph(qdet::build_line(length), gamma);
}

inline qdet::Hamiltonian ring6_h(double gamma = 1.0) {
    return qdet::hamiltonian_from_graph(qdet::build_ring(6), gamma);
}

inline qdet::Hamiltonian dangling_h(double gamma = 1.0) {
    return qdet::hamiltonian_from_graph(qdet::build_dangling_bond(), gamma);
}

// The line family is labelled 1..L; everything else is 0-based already.
inline int line_site(int label) { return label - 1; }

// Deterministic Erdos-Renyi-style graph.  Raw engine draws only, so the
// sequence is identical on every platform.
inline qdet::Graph random_graph(std::mt19937& rng, int min_nodes = 2, int max_nodes = 12) {
    const int n = min_nodes + static_cast<int>(rng() % (max_nodes - min_nodes + 1));
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng() % 100 < 35) edges.push_back({i, j});
    return qdet::Graph(n, std::move(edges));
}

inline qdet::StateVector random_state(std::mt19937& rng, int dim) {
    auto draw = [&rng]() { return double(rng()) / 4294967296.0 * 2.0 - 1.0; };
    qdet::Vector v(dim);
    double norm_sq = 0.0;
    do {
        for (int i = 0; i < dim; ++i) v(i) = qdet::Complex(draw(), draw());
        norm_sq = v.squaredNorm();
    } while (norm_sq < 1e-6);
    return qdet::StateVector::normalized(v);
}

}  // namespace desk
