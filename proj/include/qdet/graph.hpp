#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdet/types.hpp"

namespace qdet {

// Finite undirected simple graph.  Node indices are 0-based internally;
// `labels` carries the external naming convention (the line family is
// conventionally labelled 1..L, rings and the dangling-bond graph 0-based).
class Graph {
public:
    Graph(int nodes, std::vector<std::pair<int, int>> edges,
          std::vector<std::string> labels = {});

    int node_count() const { return nodes_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<std::string>& labels() const { return labels_; }

    // Dense 0/1 adjacency matrix (real, symmetric).
    Eigen::MatrixXd adjacency() const;

    int degree(int node) const;

    // Resolves an external node label to its index.
    std::optional<int> index_of_label(const std::string& label) const;

private:
    int nodes_;
    std::vector<std::pair<int, int>> edges_;   // normalized i < j, sorted
    std::vector<std::string> labels_;
};

// Tight-binding Hamiltonian H = gamma * A + diag(onsite) on a graph, stored
// dense.  Hermiticity is enforced on construction (hbar = 1 throughout).
class Hamiltonian {
public:
    explicit Hamiltonian(Matrix m, double gamma = 1.0);

    int dim() const { return static_cast<int>(matrix_.rows()); }
    const Matrix& matrix() const { return matrix_; }
    double gamma() const { return gamma_; }

    // H + c * I, used for energy-shift constructions.
    Hamiltonian shifted(double c) const;

    double spectral_radius_bound() const;  // cheap norm bound, not the exact radius

private:
    Matrix matrix_;
    double gamma_;
};

// Normalized state vector.  The norm-1 invariant is enforced on
// construction; unnormalized intermediates stay plain `Vector`s.
class StateVector {
public:
    explicit StateVector(Vector amplitudes);

    // Normalizes a raw vector (errors on the zero vector).
    static StateVector normalized(const Vector& raw);

    int dim() const { return static_cast<int>(amplitudes_.size()); }
    const Vector& amplitudes() const { return amplitudes_; }
    Complex operator[](int i) const { return amplitudes_(i); }

private:
    Vector amplitudes_;
};

Graph build_line(int length);            // path graph, labels "1".."L"
Graph build_ring(int length);            // cycle graph, labels "0".."L-1"
Graph build_dangling_bond();             // 6-site backbone with a pendant node at site 2

Hamiltonian hamiltonian_from_graph(const Graph& g, double gamma = 1.0,
                                   const RealVector& onsite = RealVector());

StateVector basis_state(int dim, int index);
StateVector uniform_state(int dim);

// JSON graph description: {"nodes": N, "edges": [[i,j],...], "gamma": g,
// "onsite": [...], "labels": [...]}; gamma/onsite/labels optional.
struct GraphSystem {
    Graph graph;
    double gamma;
    RealVector onsite;
};

GraphSystem load_graph_json(const std::string& path);
GraphSystem parse_graph_json(const std::string& text);
std::string graph_to_json(const GraphSystem& sys);

}  // namespace qdet
