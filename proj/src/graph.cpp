#include "qdet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qdet {

Graph::Graph(int nodes, std::vector<std::pair<int, int>> edges,
             std::vector<std::string> labels)
    : nodes_(nodes), edges_(std::move(edges)), labels_(std::move(labels)) {
    if (nodes_ <= 0)
        throw ValidationError("graph must have at least one node");
    std::set<std::pair<int, int>> seen;
    for (auto& [a, b] : edges_) {
        if (a < 0 || b < 0 || a >= nodes_ || b >= nodes_)
            throw ValidationError("edge endpoint out of range");
        if (a == b)
            throw ValidationError("self-loops are not allowed");
        if (a > b) std::swap(a, b);
        if (!seen.insert({a, b}).second)
            throw ValidationError("duplicate edge");
    }
    std::sort(edges_.begin(), edges_.end());
    if (labels_.empty()) {
        labels_.reserve(nodes_);
        for (int i = 0; i < nodes_; ++i) labels_.push_back(std::to_string(i));
    } else if (static_cast<int>(labels_.size()) != nodes_) {
        throw ValidationError("label list length must match node count");
    }
}

Eigen::MatrixXd Graph::adjacency() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nodes_, nodes_);
    for (const auto& [i, j] : edges_) {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
    }
    return a;
}

int Graph::degree(int node) const {
    if (node < 0 || node >= nodes_)
        throw ValidationError("node index out of range");
    int d = 0;
    for (const auto& [i, j] : edges_)
        if (i == node || j == node) ++d;
    return d;
}

std::optional<int> Graph::index_of_label(const std::string& label) const {
    for (int i = 0; i < nodes_; ++i)
        if (labels_[i] == label) return i;
    return std::nullopt;
}

Hamiltonian::Hamiltonian(Matrix m, double gamma) : matrix_(std::move(m)), gamma_(gamma) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0)
        throw ValidationError("Hamiltonian must be square and non-empty");
    const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
    if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > tol::hermiticity * scale)
        throw ValidationError("Hamiltonian is not Hermitian");
}

Hamiltonian Hamiltonian::shifted(double c) const {
    Matrix m = matrix_;
    m += c * Matrix::Identity(dim(), dim());
    return Hamiltonian(std::move(m), gamma_);
}

double Hamiltonian::spectral_radius_bound() const {
    // Row-sum (infinity) norm: cheap and sufficient for tolerance scaling.
    return matrix_.cwiseAbs().rowwise().sum().maxCoeff();
}

StateVector::StateVector(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() == 0)
        throw ValidationError("state vector must be non-empty");
    const double n = amplitudes_.norm();
    if (std::abs(n - 1.0) > tol::state_norm)
        throw ValidationError("state vector is not normalized");
    amplitudes_ /= n;
}

StateVector StateVector::normalized(const Vector& raw) {
    const double n = raw.norm();
    if (n == 0.0)
        throw ValidationError("cannot normalize the zero vector");
    return StateVector(raw / n);
}

Graph build_line(int length) {
    if (length < 1)
        throw ValidationError("line length must be at least 1");
    std::vector<std::pair<int, int>> edges;
    std::vector<std::string> labels;
    for (int i = 0; i + 1 < length; ++i) edges.push_back({i, i + 1});
    for (int i = 0; i < length; ++i) labels.push_back(std::to_string(i + 1));
    return Graph(length, std::move(edges), std::move(labels));
}

Graph build_ring(int length) {
    if (length < 3)
        throw ValidationError("ring length must be at least 3");
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < length; ++i) edges.push_back({i, (i + 1) % length});
    return Graph(length, std::move(edges));
}

Graph build_dangling_bond() {
    return Graph(7, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {2, 6}});
}

Hamiltonian hamiltonian_from_graph(const Graph& g, double gamma, const RealVector& onsite) {
    const int n = g.node_count();
    if (onsite.size() != 0 && onsite.size() != n)
        throw ValidationError("onsite vector length must match node count");
    Matrix h = (gamma * g.adjacency()).cast<Complex>();
    for (int i = 0; i < onsite.size(); ++i) h(i, i) += onsite(i);
    return Hamiltonian(std::move(h), gamma);
}

StateVector basis_state(int dim, int index) {
    if (dim <= 0 || index < 0 || index >= dim)
        throw ValidationError("basis state index out of range");
    Vector v = Vector::Zero(dim);
    v(index) = 1.0;
    return StateVector(std::move(v));
}

StateVector uniform_state(int dim) {
    if (dim <= 0)
        throw ValidationError("dimension must be positive");
    Vector v = Vector::Constant(dim, Complex(1.0 / std::sqrt(double(dim)), 0.0));
    return StateVector(std::move(v));
}

GraphSystem parse_graph_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid graph JSON: ") + e.what());
    }
    if (!j.contains("nodes") || !j["nodes"].is_number_integer())
        throw ValidationError("graph JSON needs an integer \"nodes\" field");
    const int nodes = j["nodes"].get<int>();
    std::vector<std::pair<int, int>> edges;
    if (j.contains("edges")) {
        for (const auto& e : j["edges"]) {
            if (!e.is_array() || e.size() != 2)
                throw ValidationError("each edge must be a pair [i, j]");
            edges.push_back({e[0].get<int>(), e[1].get<int>()});
        }
    }
    std::vector<std::string> labels;
    if (j.contains("labels"))
        for (const auto& l : j["labels"]) labels.push_back(l.get<std::string>());
    const double gamma = j.value("gamma", 1.0);
    RealVector onsite;
    if (j.contains("onsite")) {
        const auto& arr = j["onsite"];
        onsite.resize(arr.size());
        for (int i = 0; i < onsite.size(); ++i) onsite(i) = arr[i].get<double>();
        if (onsite.size() != nodes)
            throw ValidationError("onsite vector length must match node count");
    }
    return GraphSystem{Graph(nodes, std::move(edges), std::move(labels)), gamma, std::move(onsite)};
}

GraphSystem load_graph_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open graph file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_graph_json(buf.str());
}

std::string graph_to_json(const GraphSystem& sys) {
    nlohmann::ordered_json j;
    j["nodes"] = sys.graph.node_count();
    auto edges = nlohmann::ordered_json::array();
    for (const auto& [a, b] : sys.graph.edges()) edges.push_back({a, b});
    j["edges"] = std::move(edges);
    j["gamma"] = sys.gamma;
    if (sys.onsite.size() > 0) {
        auto onsite = nlohmann::ordered_json::array();
        for (int i = 0; i < sys.onsite.size(); ++i) onsite.push_back(sys.onsite(i));
        j["onsite"] = std::move(onsite);
    }
    j["labels"] = sys.graph.labels();
    return j.dump(2);
}

}  // namespace qdet
