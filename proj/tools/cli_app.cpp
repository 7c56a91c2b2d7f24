#include "cli_app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <optional>
#include <sstream>
#include <utility>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdet/bounds.hpp"
#include "qdet/graph.hpp"
#include "qdet/monitor.hpp"
#include "qdet/serialize.hpp"
#include "qdet/spectral.hpp"
#include "qdet/subspaces.hpp"

namespace qdet::cli {
namespace {

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

struct LoadedSystem {
    Graph graph;
    Hamiltonian h;
};

LoadedSystem load_system(const std::string& spec) {
    auto family_size = [&](const char* prefix) -> std::optional<int> {
        const std::string p(prefix);
        if (spec.rfind(p, 0) != 0) return std::nullopt;
        const std::string tail = spec.substr(p.size());
        std::size_t used = 0;
        int n = 0;
        try {
            n = std::stoi(tail, &used);
        } catch (const std::exception&) {
            used = std::string::npos;
        }
        if (used != tail.size())
            throw ValidationError("malformed system size in '" + spec + "'");
        return n;
    };
    if (spec == "dangling") {
        Graph g = build_dangling_bond();
        Hamiltonian h = hamiltonian_from_graph(g);
        return {std::move(g), std::move(h)};
    }
    if (const auto n = family_size("line:")) {
        Graph g = build_line(*n);
        Hamiltonian h = hamiltonian_from_graph(g);
        return {std::move(g), std::move(h)};
    }
    if (const auto n = family_size("ring:")) {
        Graph g = build_ring(*n);
        Hamiltonian h = hamiltonian_from_graph(g);
        return {std::move(g), std::move(h)};
    }
    GraphSystem sys = load_graph_json(spec);
    Hamiltonian h = hamiltonian_from_graph(sys.graph, sys.gamma, sys.onsite);
    return {std::move(sys.graph), std::move(h)};
}

int parse_detector(const std::string& label, const Graph& g) {
    const auto idx = g.index_of_label(label);
    if (!idx) throw ValidationError("unknown detector label '" + label + "'");
    return *idx;
}

struct InitialState {
    StateVector state;
    std::optional<int> node;  // set when the state is a single basis state
};

InitialState parse_initial(const std::string& spec, const Graph& g) {
    const int n = g.node_count();
    if (spec == "uniform") return {uniform_state(n), std::nullopt};
    const auto first = spec.find_first_not_of(" \t");
    if (first != std::string::npos && spec[first] == '[') {
        nlohmann::json arr;
        try {
            arr = nlohmann::json::parse(spec);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("bad amplitude array: ") + e.what());
        }
        if (!arr.is_array() || static_cast<int>(arr.size()) != n)
            throw ValidationError("amplitude array must have one entry per node");
        Vector v(n);
        for (int i = 0; i < n; ++i) {
            const auto& el = arr[i];
            if (el.is_number()) {
                v(i) = Complex(el.get<double>(), 0.0);
            } else if (el.is_array() && el.size() == 2 && el[0].is_number() &&
                       el[1].is_number()) {
                v(i) = Complex(el[0].get<double>(), el[1].get<double>());
            } else {
                throw ValidationError("amplitude entries are numbers or [re, im] pairs");
            }
        }
        return {StateVector::normalized(v), std::nullopt};
    }
    const auto idx = g.index_of_label(spec);
    if (!idx) throw ValidationError("unknown node label '" + spec + "'");
    return {basis_state(n, *idx), idx};
}

struct Options {
    std::string system;
    std::string detector;
    std::string initial;
    double tau = 1.0;
    int s_max = 0;
    double tol = -1.0;  // negative selects the per-command default
    std::uint64_t seed = 1;
    long long trajectories = 0;
    bool json = false;
    std::string csv_path;
};

int resolve_smax(int requested, int dim) {
    return requested > 0 ? requested : std::min(4 * dim, 200);
}

void write_csv_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    f << content;
    if (!f.good()) throw ValidationError("cannot write CSV to " + path);
}

// ---- pdet ----------------------------------------------------------------

int cmd_pdet(const Options& o, std::string& out, std::string& err) {
    if (!o.csv_path.empty())
        throw ValidationError("pdet emits no CSV; drop --csv");
    const LoadedSystem sys = load_system(o.system);
    const int det = parse_detector(o.detector, sys.graph);
    const InitialState init = parse_initial(o.initial, sys.graph);
    const StateVector d = basis_state(sys.graph.node_count(), det);
    const double agree_tol = o.tol > 0 ? o.tol : 1e-9;

    const SubspaceBasis bright = krylov_bright_basis(sys.h, d, KrylovMode::PowerH);
    const SubspaceBasis dark = dark_complement(bright);
    const DetectionResult via_bright = detection_probability_exact(bright, init.state);
    const DetectionResult via_dark = detection_probability_exact(dark, init.state);
    const double diff = std::abs(via_bright.p_det - via_dark.p_det);
    const bool agree = diff <= agree_tol;

    if (o.json) {
        JsonWriter w;
        w.begin_object();
        w.key("command").value("pdet");
        w.key("system").value(o.system);
        w.key("detector").value(o.detector);
        w.key("initial").value(o.initial);
        w.key("tolerance").value(agree_tol);
        w.key("bright_sum");
        write_detection(w, via_bright);
        w.key("dark_complement");
        write_detection(w, via_dark);
        w.key("difference").value(diff);
        w.key("agree").value(agree);
        w.end_object();
        out = w.take() + "\n";
    } else {
        std::ostringstream t;
        t << "system " << o.system << "  detector " << o.detector << "  initial "
          << o.initial << "\n";
        t << "P_det (bright sum)       " << fmt9(via_bright.p_det) << "  ["
          << via_bright.basis_size << " bright states]\n";
        t << "P_det (dark complement)  " << fmt9(via_dark.p_det) << "  ["
          << via_dark.basis_size << " dark states]\n";
        if (agree) t << "routes agree within " << fmt9(agree_tol) << "\n";
        out = t.str();
    }
    if (!agree) {
        err += "error: bright and dark routes disagree by " + fmt9(diff) + "\n";
        return 3;
    }
    return 0;
}

// ---- bounds ---------------------------------------------------------------

int cmd_bounds(const Options& o, std::string& out, std::string& err) {
    const LoadedSystem sys = load_system(o.system);
    const int det = parse_detector(o.detector, sys.graph);
    const InitialState init = parse_initial(o.initial, sys.graph);
    const int dim = sys.graph.node_count();
    const StateVector d = basis_state(dim, det);
    const int s_max = resolve_smax(o.s_max, dim);
    const double coincide_tol = o.tol > 0 ? o.tol : 1e-9;

    std::optional<int> dist;
    std::optional<BoundReport> dist_bound;
    std::optional<int> smallest;
    std::optional<BoundReport> smallest_bound;
    std::string dist_note;
    if (init.node) {
        dist = distance_s(sys.graph, *init.node, det);
        if (!dist) {
            dist_note = "initial node is disconnected from the detector";
        } else if (*dist == 0) {
            dist_note = "initial state sits on the detector";
        } else {
            try {
                dist_bound = lower_bound_commutator_auto(sys.h, d, init.state, *dist);
            } catch (const DegeneracyError& e) {
                dist_note = e.what();
            }
        }
    } else {
        smallest = smallest_nonvacuous_s(sys.h, d, init.state, s_max);
        if (smallest) {
            try {
                smallest_bound =
                    lower_bound_commutator_auto(sys.h, d, init.state, *smallest);
            } catch (const DegeneracyError& e) {
                dist_note = e.what();
            }
        } else {
            dist_note = "no informative power s up to the sweep limit";
        }
    }

    const SweepResult sweep = sweep_s(sys.h, d, init.state, s_max);

    std::optional<BoundReport> prop;
    std::string prop_note;
    try {
        prop = lower_bound_propagator(sys.h, o.tau, d, init.state);
    } catch (const ValidationError& e) {
        prop_note = e.what();
    } catch (const DegeneracyError& e) {
        prop_note = e.what();
    }

    const SubspaceBasis dark =
        dark_complement(krylov_bright_basis(sys.h, d, KrylovMode::PowerH));
    const std::optional<BoundReport> upper =
        dark.size() > 0 ? best_dark_upper_bound(sys.h, dark, init.state) : std::nullopt;

    double best_lower = sweep.best_value;
    if (dist_bound && !dist_bound->rhs_zero)
        best_lower = std::max(best_lower, dist_bound->value);
    if (prop && !prop->rhs_zero) best_lower = std::max(best_lower, prop->value);
    const bool coincide =
        upper && best_lower > 0.0 && std::abs(best_lower - upper->value) <= coincide_tol;

    if (!o.csv_path.empty()) write_csv_file(o.csv_path, sweep_to_csv(sweep));

    if (o.json) {
        JsonWriter w;
        w.begin_object();
        w.key("command").value("bounds");
        w.key("system").value(o.system);
        w.key("detector").value(o.detector);
        w.key("initial").value(o.initial);
        w.key("tau").value(o.tau);
        w.key("s_max").value(s_max);
        if (dist) w.key("distance_s").value(*dist);
        if (dist_bound) {
            w.key("distance_bound");
            write_bound(w, *dist_bound);
        }
        if (smallest) w.key("smallest_informative_s").value(*smallest);
        if (smallest_bound) {
            w.key("smallest_informative_bound");
            write_bound(w, *smallest_bound);
        }
        if (!dist_note.empty()) w.key("distance_note").value(dist_note);
        w.key("sweep");
        write_sweep(w, sweep);
        if (prop) {
            w.key("propagator");
            write_bound(w, *prop);
        } else {
            w.key("propagator_skipped").value(prop_note);
        }
        w.key("dark_dimension").value(dark.size());
        if (upper) {
            w.key("dark_upper");
            write_bound(w, *upper);
        }
        w.key("best_lower").value(best_lower);
        w.key("coincide").value(coincide);
        w.end_object();
        out = w.take() + "\n";
        return 0;
    }

    auto mark = [](const BoundReport& r) {
        std::string s = fmt9(r.value);
        if (r.rhs_zero) s += "  [vacuous: sharpening term is zero]";
        if (r.auto_shifted) s += "  [energy shift c=" + fmt9(r.shift_c) + "]";
        return s;
    };
    std::ostringstream t;
    t << "system " << o.system << "  detector " << o.detector << "  initial "
      << o.initial << "\n";
    if (dist) t << "graph distance to detector: " << *dist << "\n";
    t << "lower bounds\n";
    if (dist_bound)
        t << "  commutator s=" << *dist_bound->s << " (distance)   "
          << mark(*dist_bound) << "\n";
    if (smallest_bound)
        t << "  commutator s=" << *smallest_bound->s << " (smallest informative)   "
          << mark(*smallest_bound) << "\n";
    if (!dist_note.empty()) t << "  commutator at fixed s: skipped (" << dist_note << ")\n";
    t << "  sweep best s=" << sweep.best_s << " (s_max " << s_max << ")   "
      << fmt9(sweep.best_value);
    if (sweep.saturated) t << "  [saturated]";
    if (sweep.oscillating) t << "  [odd/even oscillation]";
    t << "\n";
    if (prop)
        t << "  propagator tau=" << fmt9(o.tau) << "   " << mark(*prop) << "\n";
    else
        t << "  propagator tau=" << fmt9(o.tau) << "   skipped (" << prop_note << ")\n";
    if (dark.size() == 0) {
        t << "upper bound: none (no dark subspace, every state is detected)\n";
    } else if (!upper) {
        t << "upper bound: none (all dark states are stationary)\n";
    } else {
        t << "upper bound\n  dark commutator s=" << *upper->s << "   " << mark(*upper)
          << "\n";
    }
    if (coincide)
        t << "lower and upper bounds coincide: P_det = " << fmt9(upper->value) << "\n";
    out = t.str();
    (void)err;
    return 0;
}

// ---- simulate ---------------------------------------------------------------

int cmd_simulate(const Options& o, std::string& out, std::string& err) {
    const LoadedSystem sys = load_system(o.system);
    const int det = parse_detector(o.detector, sys.graph);
    const InitialState init = parse_initial(o.initial, sys.graph);
    const int dim = sys.graph.node_count();
    const StateVector d = basis_state(dim, det);
    const double increment_tol = o.tol > 0 ? o.tol : 1e-12;
    if (o.tau <= 0) throw ValidationError("sampling period tau must be positive");

    const MonitoringRun run =
        run_to_convergence(sys.h, o.tau, d, init.state, increment_tol);
    const ResonanceReport reso = check_resonant_tau(eigendecompose(sys.h), o.tau);
    const double exact =
        detection_probability_exact(krylov_bright_basis(sys.h, d, KrylovMode::PowerH),
                                    init.state)
            .p_det;
    const double diff = std::abs(run.p_detect() - exact);
    const bool comparison_valid = !reso.resonant();

    if (reso.resonant())
        err += "warning: sampling period tau=" + fmt9(o.tau) +
               " is resonant; the stroboscopic limit need not match the "
               "generic-period exact value\n";

    struct Mc {
        long long detected = 0;
        double frequency = 0.0;
        std::int64_t n_cap = 0;
    };
    std::optional<Mc> mc;
    if (o.trajectories > 0) {
        Mc m;
        m.n_cap = std::max<std::int64_t>(200, 4LL * run.steps());
        for (long long i = 0; i < o.trajectories; ++i)
            if (trajectory_sample(sys.h, o.tau, d, init.state, o.seed + i, m.n_cap)
                    .detected)
                ++m.detected;
        m.frequency = double(m.detected) / double(o.trajectories);
        mc = m;
    }

    if (!o.csv_path.empty()) write_csv_file(o.csv_path, run_to_csv(run));

    if (o.json) {
        JsonWriter w;
        w.begin_object();
        w.key("command").value("simulate");
        w.key("system").value(o.system);
        w.key("detector").value(o.detector);
        w.key("initial").value(o.initial);
        w.key("increment_tol").value(increment_tol);
        w.key("run");
        write_run_summary(w, run);
        w.key("resonance");
        write_resonance(w, reso);
        w.key("exact_p_det").value(exact);
        w.key("difference").value(diff);
        w.key("comparison_valid").value(comparison_valid);
        if (mc) {
            w.key("trajectories");
            w.begin_object();
            w.key("count").value(o.trajectories);
            w.key("seed").value(static_cast<long long>(o.seed));
            w.key("n_cap").value(static_cast<long long>(mc->n_cap));
            w.key("detected").value(mc->detected);
            w.key("frequency").value(mc->frequency);
            w.end_object();
        }
        w.end_object();
        out = w.take() + "\n";
        return 0;
    }

    std::ostringstream t;
    t << "system " << o.system << "  detector " << o.detector << "  initial "
      << o.initial << "  tau " << fmt9(o.tau) << "\n";
    t << "steps " << run.steps() << "  converged " << (run.converged ? "yes" : "no")
      << "\n";
    t << "P_det estimate  " << fmt9(run.p_detect()) << "  (tail estimate "
      << fmt9(run.tail_estimate) << ")\n";
    t << "exact P_det     " << fmt9(exact) << "  (difference " << fmt9(diff) << ")\n";
    if (comparison_valid)
        t << "sampling period is generic: estimate and exact value are comparable\n";
    else
        t << "sampling period is resonant (" << reso.pairs.size()
          << " level pairs): exact comparison is not meaningful\n";
    if (mc)
        t << "monte carlo: " << mc->detected << "/" << o.trajectories
          << " detected (frequency " << fmt9(mc->frequency) << ", cap " << mc->n_cap
          << " attempts)\n";
    out = t.str();
    return 0;
}

// ---- spectrum ---------------------------------------------------------------

int cmd_spectrum(const Options& o, std::string& out, std::string& err) {
    const LoadedSystem sys = load_system(o.system);
    const Spectrum spec = eigendecompose(sys.h);
    const ResonanceReport reso = check_resonant_tau(spec, o.tau);

    if (o.json) {
        JsonWriter w;
        w.begin_object();
        w.key("command").value("spectrum");
        w.key("system").value(o.system);
        w.key("spectrum");
        write_spectrum(w, spec);
        w.key("resonance");
        write_resonance(w, reso);
        w.end_object();
        out = w.take() + "\n";
        return 0;
    }

    std::ostringstream t;
    t << "system " << o.system << "  dimension " << spec.dim() << "\n";
    t << "eigenvalues";
    for (int i = 0; i < spec.dim(); ++i) t << " " << fmt9(spec.eigenvalues()(i));
    t << "\nlevels\n";
    for (std::size_t j = 0; j < spec.levels().size(); ++j)
        t << "  E = " << fmt9(spec.levels()[j].energy) << "  (multiplicity "
          << spec.levels()[j].indices.size() << ")\n";
    t << "spectral radius " << fmt9(spec.spectral_radius()) << "\n";
    if (reso.resonant()) {
        t << "tau " << fmt9(o.tau) << " is resonant for " << reso.pairs.size()
          << " level pair(s)\n";
        for (const auto& p : reso.pairs)
            t << "  levels " << p.level_a << "," << p.level_b << "  k=" << p.k
              << "  residual " << fmt9(p.residual) << "\n";
    } else {
        t << "tau " << fmt9(o.tau) << " is generic (no resonant level pairs)\n";
    }
    out = t.str();
    (void)err;
    return 0;
}

// ---- reproduce ----------------------------------------------------------------

constexpr double kReproduceTol = 1e-9;

struct Check {
    std::string name;
    double computed = 0.0;
    double expected = 0.0;

    bool pass() const { return std::abs(computed - expected) <= kReproduceTol; }
};

struct TargetResult {
    std::string name;
    std::vector<Check> checks;
    std::string file_json;
    int mismatches = 0;
    double max_diff = 0.0;
};

TargetResult finish_target(const std::string& name, std::vector<Check> checks,
                           const std::function<void(JsonWriter&)>& extras = {}) {
    TargetResult r;
    r.name = name;
    for (const auto& c : checks) {
        r.max_diff = std::max(r.max_diff, std::abs(c.computed - c.expected));
        if (!c.pass()) ++r.mismatches;
    }
    JsonWriter w;
    w.begin_object();
    w.key("target").value(name);
    w.key("tolerance").value(kReproduceTol);
    w.key("checks").begin_array();
    for (const auto& c : checks) {
        w.begin_object();
        w.key("name").value(c.name);
        w.key("computed").value(c.computed);
        w.key("expected").value(c.expected);
        w.key("pass").value(c.pass());
        w.end_object();
    }
    w.end_array();
    w.key("mismatches").value(r.mismatches);
    w.key("max_abs_diff").value(r.max_diff);
    w.key("pass").value(r.mismatches == 0);
    if (extras) extras(w);
    w.end_object();
    r.file_json = w.take();
    r.checks = std::move(checks);
    return r;
}

double pdet_between(const Hamiltonian& h, const StateVector& d, const StateVector& psi) {
    return detection_probability_exact(krylov_bright_basis(h, d, KrylovMode::PowerH), psi)
        .p_det;
}

// Line with five sites: every exact detection probability and the
// distance-s commutator bounds between localized states.
TargetResult make_fig1() {
    const LoadedSystem sys = load_system("line:5");
    const int n = 5;
    auto site = [&](int label) {
        return basis_state(n, *sys.graph.index_of_label(std::to_string(label)));
    };

    auto detector_block = [&](int det_label) {
        std::vector<Check> block;
        const StateVector d = site(det_label);
        for (int r = 1; r <= 5; ++r) {
            double expected = 0.0;
            if (det_label == 1) expected = 1.0;
            if (det_label == 2) expected = (r % 2 == 0) ? 1.0 : 2.0 / 3.0;
            if (det_label == 3) expected = (r == 3) ? 1.0 : 0.5;
            block.push_back({"pdet " + std::to_string(r) + "->" +
                                 std::to_string(det_label),
                             pdet_between(sys.h, d, site(r)), expected});
        }
        return block;
    };

    std::vector<std::future<std::vector<Check>>> blocks;
    for (int det_label : {1, 2, 3})
        blocks.push_back(std::async(std::launch::async, detector_block, det_label));

    std::vector<Check> checks;
    for (auto& f : blocks)
        for (auto& c : f.get()) checks.push_back(std::move(c));

    struct BoundRow {
        int r;
        int det;
        int s;
        double expected;
    };
    const BoundRow rows[] = {{2, 1, 1, 1.0},       {3, 1, 2, 1.0},
                             {4, 1, 3, 0.2},       {5, 1, 4, 0.1},
                             {1, 2, 1, 0.5},       {3, 2, 1, 0.5},
                             {4, 2, 2, 1.0},       {5, 2, 3, 1.0 / 14.0}};
    for (const auto& row : rows) {
        const double value =
            lower_bound_commutator(sys.h, site(row.det), site(row.r), row.s).value;
        checks.push_back({"bound " + std::to_string(row.r) + "->" +
                              std::to_string(row.det) + " s=" + std::to_string(row.s),
                          value, row.expected});
    }
    return finish_target("fig1", std::move(checks));
}

// Six-site ring, detector on node 0: exact values and distance-s bounds.
TargetResult make_fig2() {
    const LoadedSystem sys = load_system("ring:6");
    const StateVector d = basis_state(6, 0);

    std::vector<Check> checks;
    const double exact[] = {1.0, 0.5, 0.5, 1.0, 0.5, 0.5};
    for (int r = 0; r < 6; ++r)
        checks.push_back({"pdet " + std::to_string(r) + "->0",
                          pdet_between(sys.h, d, basis_state(6, r)), exact[r]});

    const double bound_expected[] = {0.5, 0.5, 2.0 / 11.0, 0.5, 0.5};
    for (int r = 1; r <= 5; ++r) {
        const int s = distance_s(sys.graph, r, 0).value();
        const double value =
            lower_bound_commutator(sys.h, d, basis_state(6, r), s).value;
        checks.push_back({"bound " + std::to_string(r) + "->0 s=" + std::to_string(s),
                          value, bound_expected[r - 1]});
    }
    return finish_target("fig2", std::move(checks));
}

// Dangling-bond graph, detector on the end node 0: exact values and
// distance-s bounds for every start.
TargetResult make_fig3() {
    const LoadedSystem sys = load_system("dangling");
    const StateVector d = basis_state(7, 0);

    std::vector<Check> checks;
    const double exact[] = {1.0, 1.0, 1.0, 2.0 / 3.0, 1.0, 2.0 / 3.0, 2.0 / 3.0};
    for (int r = 0; r < 7; ++r)
        checks.push_back({"pdet " + std::to_string(r) + "->0",
                          pdet_between(sys.h, d, basis_state(7, r)), exact[r]});

    const double bound_expected[] = {1.0, 1.0, 1.0 / 6.0, 1.0 / 17.0, 1.0 / 78.0,
                                     1.0 / 6.0};
    for (int r = 1; r <= 6; ++r) {
        const int s = distance_s(sys.graph, r, 0).value();
        const double value =
            lower_bound_commutator(sys.h, d, basis_state(7, r), s).value;
        checks.push_back({"bound " + std::to_string(r) + "->0 s=" + std::to_string(s),
                          value, bound_expected[r - 1]});
    }
    return finish_target("fig3", std::move(checks));
}

const double kTable1[] = {2.0 / 7.0, 2.0 / 7.0, 11.0 / 21.0, 42.0 / 119.0,
                          167.0 / 273.0};

// Commutator bound versus s for the uniform start on the dangling bond.
TargetResult make_table1() {
    const LoadedSystem sys = load_system("dangling");
    const SweepResult sweep = sweep_s(sys.h, basis_state(7, 0), uniform_state(7), 5);

    std::vector<Check> checks;
    for (int s = 1; s <= 5; ++s)
        checks.push_back({"bound uniform->0 s=" + std::to_string(s),
                          sweep.entries[s - 1].value, kTable1[s - 1]});
    return finish_target("table1", std::move(checks), [&](JsonWriter& w) {
        w.key("sweep");
        write_sweep(w, sweep);
    });
}

// Bound-versus-s curves on the dangling bond for the uniform and the
// localized |5> starts, swept to the default limit.
TargetResult make_fig4() {
    const LoadedSystem sys = load_system("dangling");
    const StateVector d = basis_state(7, 0);

    auto uniform_future = std::async(std::launch::async, [&] {
        return sweep_s(sys.h, d, uniform_state(7));
    });
    const SweepResult localized = sweep_s(sys.h, d, basis_state(7, 5));
    const SweepResult uniform = uniform_future.get();

    std::vector<Check> checks;
    for (int s = 1; s <= 5; ++s)
        checks.push_back({"uniform s=" + std::to_string(s),
                          uniform.entries[s - 1].value, kTable1[s - 1]});
    for (int s = 1; s <= 4; ++s)
        checks.push_back(
            {"localized s=" + std::to_string(s), localized.entries[s - 1].value, 0.0});
    checks.push_back({"localized s=5", localized.entries[4].value, 1.0 / 78.0});
    checks.push_back({"uniform curve saturates", uniform.saturated ? 1.0 : 0.0, 1.0});
    checks.push_back(
        {"uniform curve oscillates odd/even", uniform.oscillating ? 1.0 : 0.0, 1.0});
    checks.push_back(
        {"pdet uniform->0", pdet_between(sys.h, d, uniform_state(7)), 20.0 / 21.0});
    checks.push_back(
        {"pdet 5->0", pdet_between(sys.h, d, basis_state(7, 5)), 2.0 / 3.0});

    return finish_target("fig4", std::move(checks), [&](JsonWriter& w) {
        w.key("sweep_uniform");
        write_sweep(w, uniform);
        w.key("sweep_localized");
        write_sweep(w, localized);
    });
}

// Dangling-bond worked example: power-iteration bright span, the single
// dark state, exact detection probabilities, distance bounds, Var(H^5).
TargetResult make_appendix() {
    const LoadedSystem sys = load_system("dangling");
    const StateVector d = basis_state(7, 0);
    const SubspaceBasis bright = krylov_bright_basis(sys.h, d, KrylovMode::PowerH);
    const SubspaceBasis dark = dark_complement(bright);

    std::vector<Check> checks;
    checks.push_back({"bright dimension", double(bright.size()), 6.0});
    checks.push_back({"dark dimension", double(dark.size()), 1.0});

    // The six power-iteration states, written out with integer weights.
    const double table[6][7] = {
        {1, 0, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0, 0}, {1, 0, 1, 0, 0, 0, 0},
        {0, 2, 0, 1, 0, 0, 1}, {2, 0, 4, 0, 1, 0, 0}, {0, 6, 0, 5, 0, 1, 4}};
    Matrix raw(7, 6);
    for (int k = 0; k < 6; ++k) {
        Vector col(7);
        for (int i = 0; i < 7; ++i) col(i) = table[k][i];
        raw.col(k) = col / col.norm();
    }
    const Matrix span =
        raw * (raw.adjoint() * raw).inverse() * raw.adjoint();
    const double span_diff = (span - bright.projector()).cwiseAbs().maxCoeff();
    checks.push_back({"bright span matches the six listed states", span_diff, 0.0});

    Vector delta = Vector::Zero(7);
    delta(6) = 1.0;
    delta(3) = -1.0;
    delta(5) = 1.0;
    delta /= std::sqrt(3.0);
    const double recovery =
        dark.size() == 1 ? std::abs(delta.dot(dark.vector(0))) : 0.0;
    checks.push_back({"dark state recovered up to sign", recovery, 1.0});

    const double exact[] = {1.0, 1.0, 1.0, 2.0 / 3.0, 1.0, 2.0 / 3.0, 2.0 / 3.0};
    for (int r = 0; r < 7; ++r)
        checks.push_back({"pdet " + std::to_string(r) + "->0",
                          pdet_between(sys.h, d, basis_state(7, r)), exact[r]});

    const double bound_expected[] = {1.0, 1.0, 1.0 / 6.0, 1.0 / 17.0, 1.0 / 78.0};
    for (int r = 1; r <= 5; ++r) {
        const int s = distance_s(sys.graph, r, 0).value();
        checks.push_back({"bound " + std::to_string(r) + "->0 s=" + std::to_string(s),
                          lower_bound_commutator(sys.h, d, basis_state(7, r), s).value,
                          bound_expected[r - 1]});
    }
    checks.push_back({"Var(H^5) in the detector state",
                      variance_in_state(sys.h, 5, d), 78.0});

    return finish_target("appendix", std::move(checks), [&](JsonWriter& w) {
        w.key("dark_state");
        w.begin_array();
        if (dark.size() == 1) write_vector(w, dark.vector(0));
        w.end_array();
    });
}

TargetResult make_target(const std::string& name) {
    if (name == "fig1") return make_fig1();
    if (name == "fig2") return make_fig2();
    if (name == "fig3") return make_fig3();
    if (name == "fig4") return make_fig4();
    if (name == "table1") return make_table1();
    if (name == "appendix") return make_appendix();
    throw ValidationError("unknown reproduce target '" + name + "'");
}

int cmd_reproduce(const std::string& target, bool json_mode, std::string& out,
                  std::string& err) {
    static const std::vector<std::string> kAll = {"fig1",   "fig2",   "fig3",
                                                  "fig4",   "table1", "appendix"};
    std::vector<std::string> wanted;
    if (target == "all") {
        wanted = kAll;
    } else {
        if (std::find(kAll.begin(), kAll.end(), target) == kAll.end())
            throw ValidationError("unknown reproduce target '" + target + "'");
        wanted.push_back(target);
    }

    const char* env = std::getenv("QDET_OUTPUT_DIR");
    const std::filesystem::path outdir = (env && *env) ? env : ".";
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec)
        throw ValidationError("cannot create output directory " + outdir.string());

    std::vector<std::future<TargetResult>> futures;
    futures.reserve(wanted.size());
    for (const auto& name : wanted)
        futures.push_back(
            std::async(std::launch::async, [name] { return make_target(name); }));

    bool all_pass = true;
    std::ostringstream text;
    std::vector<std::string> payloads;
    for (auto& f : futures) {
        const TargetResult r = f.get();
        const std::filesystem::path path = outdir / (r.name + ".json");
        {
            std::ofstream file(path);
            file << r.file_json << "\n";
            if (!file.good())
                throw ValidationError("cannot write " + path.string());
        }
        text << r.name << ": " << r.checks.size() << " checks, " << r.mismatches
             << " mismatches -> " << path.string() << "\n";
        for (const auto& c : r.checks)
            if (!c.pass())
                text << "  MISMATCH " << c.name << ": computed "
                     << format_g12(c.computed) << " expected "
                     << format_g12(c.expected) << "\n";
        if (r.mismatches > 0) all_pass = false;
        payloads.push_back(r.file_json);
    }

    if (json_mode) {
        if (payloads.size() == 1) {
            out = payloads.front() + "\n";
        } else {
            out = "[";
            for (std::size_t i = 0; i < payloads.size(); ++i) {
                if (i) out += ",";
                out += payloads[i];
            }
            out += "]\n";
        }
    } else {
        out = text.str();
    }
    if (!all_pass) err += "error: reproduction mismatches above tolerance\n";
    return all_pass ? 0 : 1;
}

}  // namespace

CliResult run_cli(const std::vector<std::string>& args) {
    CLI::App app{"dark/bright subspace decomposition and detection bounds for "
                 "finitely monitored quantum walks"};
    app.require_subcommand(1);

    Options o;
    std::string target;

    const std::string system_help =
        "line:<L> | ring:<L> | dangling | path to a graph JSON file";
    const std::string initial_help =
        "node label | uniform | JSON amplitude array (normalized on load)";

    CLI::App* pdet = app.add_subcommand(
        "pdet", "exact total detection probability via both subspace routes");
    CLI::App* bounds = app.add_subcommand(
        "bounds", "uncertainty lower bounds, s sweep, and dark upper bound");
    CLI::App* simulate = app.add_subcommand(
        "simulate", "stroboscopic monitoring run with convergence report");
    CLI::App* spectrum = app.add_subcommand(
        "spectrum", "eigenvalues, degeneracy grouping, resonance check");
    CLI::App* reproduce = app.add_subcommand(
        "reproduce", "recompute a published artifact and diff against goldens");

    for (CLI::App* sc : {pdet, bounds, simulate, spectrum}) {
        sc->add_option("--system", o.system, system_help)->required();
        sc->add_flag("--json", o.json, "canonical JSON output");
    }
    for (CLI::App* sc : {pdet, bounds, simulate}) {
        sc->add_option("--detector", o.detector, "detector node label")->required();
        sc->add_option("--initial", o.initial, initial_help)->required();
        sc->add_option("--tol", o.tol, "tolerance override");
    }
    for (CLI::App* sc : {bounds, simulate, spectrum})
        sc->add_option("--tau", o.tau, "sampling period (default 1.0)");
    bounds->add_option("--smax", o.s_max, "sweep limit (default 4*dim, max 200)");
    bounds->add_option("--csv", o.csv_path, "write the s sweep as CSV");
    simulate->add_option("--csv", o.csv_path, "write per-step increments as CSV");
    simulate->add_option("--seed", o.seed, "base RNG seed for trajectories");
    simulate->add_option("--trajectories", o.trajectories,
                         "also sample this many monitored trajectories");
    reproduce->add_option("target", target,
                          "fig1|fig2|fig3|fig4|table1|appendix|all")
        ->required();
    reproduce->add_flag("--json", o.json, "print the report JSON to stdout");

    CliResult result;
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        result.out = app.help();
        return result;
    } catch (const CLI::ParseError& e) {
        result.err = std::string("error: ") + e.what() + "\n";
        result.exit_code = 2;
        return result;
    }

    try {
        if (pdet->parsed())
            result.exit_code = cmd_pdet(o, result.out, result.err);
        else if (bounds->parsed())
            result.exit_code = cmd_bounds(o, result.out, result.err);
        else if (simulate->parsed())
            result.exit_code = cmd_simulate(o, result.out, result.err);
        else if (spectrum->parsed())
            result.exit_code = cmd_spectrum(o, result.out, result.err);
        else if (reproduce->parsed())
            result.exit_code = cmd_reproduce(target, o.json, result.out, result.err);
    } catch (const ValidationError& e) {
        result.err += std::string("error: ") + e.what() + "\n";
        result.exit_code = 2;
    } catch (const DegeneracyError& e) {
        result.err += std::string("error: ") + e.what() + "\n";
        result.exit_code = 3;
    }
    return result;
}

}  // namespace qdet::cli
