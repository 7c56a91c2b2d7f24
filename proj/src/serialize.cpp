#include "qdet/serialize.hpp"

#include <cstdio>

namespace qdet {

void JsonWriter::separate() {
    if (pending_key_) {
        pending_key_ = false;
        return;
    }
    if (!stack_.empty()) {
        if (has_items_.back()) out_ += ',';
        has_items_.back() = true;
    }
}

JsonWriter& JsonWriter::begin_object() {
    separate();
    out_ += '{';
    stack_.push_back('o');
    has_items_.push_back(false);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ += '}';
    stack_.pop_back();
    has_items_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    separate();
    out_ += '[';
    stack_.push_back('a');
    has_items_.push_back(false);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ += ']';
    stack_.pop_back();
    has_items_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::key(std::string_view k) {
    if (has_items_.back()) out_ += ',';
    has_items_.back() = true;
    out_ += '"';
    out_.append(k);
    out_ += "\":";
    pending_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    separate();
    out_ += format_g12(v);
    return *this;
}

JsonWriter& JsonWriter::value(int v) { return value(static_cast<long long>(v)); }

JsonWriter& JsonWriter::value(long long v) {
    separate();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", v);
    out_ += buf;
    return *this;
}

JsonWriter& JsonWriter::value(bool v) {
    separate();
    out_ += v ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::value(std::string_view v) {
    separate();
    out_ += '"';
    for (char c : v) {
        switch (c) {
            case '"': out_ += "\\\""; break;
            case '\\': out_ += "\\\\"; break;
            case '\n': out_ += "\\n"; break;
            case '\t': out_ += "\\t"; break;
            default: out_ += c;
        }
    }
    out_ += '"';
    return *this;
}

std::string format_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string_view kind_name(SubspaceKind k) {
    return k == SubspaceKind::Bright ? "bright" : "dark";
}

std::string_view kind_name(BoundKind k) {
    return k == BoundKind::Lower ? "lower" : "upper";
}

std::string_view construction_name(Construction c) {
    switch (c) {
        case Construction::KrylovH: return "krylov-H";
        case Construction::KrylovU: return "krylov-U";
        case Construction::Spectral: return "spectral";
    }
    return "?";
}

std::string_view method_name(BoundMethod m) {
    switch (m) {
        case BoundMethod::CommutatorS: return "commutator-s";
        case BoundMethod::PropagatorTau: return "propagator-tau";
        case BoundMethod::PathCountS: return "path-count-s";
        case BoundMethod::DarkCommutator: return "dark-commutator";
    }
    return "?";
}

void write_complex(JsonWriter& w, const Complex& z) {
    w.begin_array().value(z.real()).value(z.imag()).end_array();
}

void write_vector(JsonWriter& w, const Vector& v) {
    w.begin_array();
    for (int i = 0; i < v.size(); ++i) write_complex(w, v(i));
    w.end_array();
}

void write_spectrum(JsonWriter& w, const Spectrum& spec) {
    w.begin_object();
    w.key("eigenvalues").begin_array();
    for (int i = 0; i < spec.dim(); ++i) w.value(spec.eigenvalues()(i));
    w.end_array();
    w.key("levels").begin_array();
    for (const auto& lv : spec.levels()) {
        w.begin_object();
        w.key("energy").value(lv.energy);
        w.key("indices").begin_array();
        for (int i : lv.indices) w.value(i);
        w.end_array();
        w.end_object();
    }
    w.end_array();
    w.key("spectral_radius").value(spec.spectral_radius());
    w.end_object();
}

void write_resonance(JsonWriter& w, const ResonanceReport& report) {
    w.begin_object();
    w.key("tau").value(report.tau);
    w.key("resonant").value(report.resonant());
    w.key("pairs").begin_array();
    for (const auto& p : report.pairs) {
        w.begin_object();
        w.key("level_a").value(p.level_a);
        w.key("level_b").value(p.level_b);
        w.key("k").value(static_cast<long long>(p.k));
        w.key("residual").value(p.residual);
        w.end_object();
    }
    w.end_array();
    w.end_object();
}

void write_basis(JsonWriter& w, const SubspaceBasis& basis) {
    w.begin_object();
    w.key("kind").value(kind_name(basis.kind()));
    w.key("construction").value(construction_name(basis.construction()));
    if (basis.tau()) w.key("tau").value(*basis.tau());
    w.key("dimension").value(basis.size());
    w.key("vectors").begin_array();
    for (int i = 0; i < basis.size(); ++i) write_vector(w, basis.vector(i));
    w.end_array();
    w.end_object();
}

void write_detection(JsonWriter& w, const DetectionResult& result) {
    w.begin_object();
    w.key("p_det").value(result.p_det);
    w.key("route").value(result.basis_kind == SubspaceKind::Bright ? "bright-sum"
                                                                   : "dark-complement");
    w.key("construction").value(construction_name(result.construction));
    w.key("basis_dimension").value(result.basis_size);
    w.end_object();
}

void write_bound(JsonWriter& w, const BoundReport& report) {
    w.begin_object();
    w.key("kind").value(kind_name(report.kind));
    w.key("method").value(method_name(report.method));
    if (report.s) w.key("s").value(*report.s);
    if (report.tau) w.key("tau").value(*report.tau);
    w.key("shift_c").value(report.shift_c);
    w.key("value").value(report.value);
    w.key("raw").value(report.raw);
    w.key("rhs_zero").value(report.rhs_zero);
    w.key("auto_shifted").value(report.auto_shifted);
    w.end_object();
}

void write_sweep(JsonWriter& w, const SweepResult& sweep) {
    w.begin_object();
    w.key("entries").begin_array();
    for (const auto& e : sweep.entries) {
        w.begin_object();
        w.key("s").value(e.s);
        w.key("ok").value(e.ok);
        if (e.ok) {
            w.key("value").value(e.value);
            w.key("rhs_zero").value(e.rhs_zero);
        } else {
            w.key("error").value(e.error);
        }
        w.key("shift_c").value(e.shift_c);
        w.end_object();
    }
    w.end_array();
    w.key("best_s").value(sweep.best_s);
    w.key("best_value").value(sweep.best_value);
    w.key("saturated").value(sweep.saturated);
    w.key("oscillating").value(sweep.oscillating);
    w.end_object();
}

void write_run_summary(JsonWriter& w, const MonitoringRun& run) {
    w.begin_object();
    w.key("tau").value(run.tau);
    w.key("steps").value(run.steps());
    w.key("p_det_estimate").value(run.p_detect());
    w.key("converged").value(run.converged);
    w.key("tail_estimate").value(run.tail_estimate);
    w.key("survival_norm_sq").value(run.survival_raw.squaredNorm());
    w.end_object();
}

std::string sweep_to_csv(const SweepResult& sweep) {
    std::string out = "s,value,rhs_zero,shift_c\n";
    for (const auto& e : sweep.entries) {
        if (!e.ok) continue;
        out += std::to_string(e.s) + ',' + format_g12(e.value) + ',' +
               (e.rhs_zero ? "1" : "0") + ',' + format_g12(e.shift_c) + '\n';
    }
    return out;
}

std::string bounds_to_csv(const std::vector<BoundReport>& reports) {
    std::string out = "kind,method,s,tau,value,raw,rhs_zero,shift_c\n";
    for (const auto& r : reports) {
        out += std::string(kind_name(r.kind)) + ',' + std::string(method_name(r.method)) + ',';
        out += (r.s ? std::to_string(*r.s) : std::string()) + ',';
        out += (r.tau ? format_g12(*r.tau) : std::string()) + ',';
        out += format_g12(r.value) + ',' + format_g12(r.raw) + ',';
        out += (r.rhs_zero ? "1" : "0") + std::string(1, ',') + format_g12(r.shift_c) + '\n';
    }
    return out;
}

std::string run_to_csv(const MonitoringRun& run) {
    std::string out = "n,increment,cumulative\n";
    for (int i = 0; i < run.steps(); ++i) {
        out += std::to_string(i + 1) + ',' + format_g12(std::norm(run.amplitudes[i])) +
               ',' + format_g12(run.cumulative[i]) + '\n';
    }
    return out;
}

}  // namespace qdet
