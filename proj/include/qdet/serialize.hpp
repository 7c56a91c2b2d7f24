#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qdet/bounds.hpp"
#include "qdet/monitor.hpp"
#include "qdet/spectral.hpp"
#include "qdet/subspaces.hpp"
#include "qdet/types.hpp"

namespace qdet {

// Streaming JSON writer with a fixed float format (%.12g) and keys emitted
// in call order, so equal inputs serialize to identical bytes.
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(std::string_view k);
    JsonWriter& value(double v);
    JsonWriter& value(int v);
    JsonWriter& value(long long v);
    JsonWriter& value(bool v);
    JsonWriter& value(std::string_view v);
    // Keeps string literals away from the bool overload.
    JsonWriter& value(const char* v) { return value(std::string_view(v)); }
    std::string take() { return std::move(out_); }

private:
    void separate();
    std::string out_;
    std::vector<char> stack_;      // 'o' or 'a'
    std::vector<bool> has_items_;
    bool pending_key_ = false;
};

std::string format_g12(double v);

std::string_view kind_name(SubspaceKind k);
std::string_view kind_name(BoundKind k);
std::string_view construction_name(Construction c);
std::string_view method_name(BoundMethod m);

void write_complex(JsonWriter& w, const Complex& z);   // [re, im]
void write_vector(JsonWriter& w, const Vector& v);     // array of [re, im]
void write_spectrum(JsonWriter& w, const Spectrum& spec);
void write_resonance(JsonWriter& w, const ResonanceReport& report);
void write_basis(JsonWriter& w, const SubspaceBasis& basis);
void write_detection(JsonWriter& w, const DetectionResult& result);
void write_bound(JsonWriter& w, const BoundReport& report);
void write_sweep(JsonWriter& w, const SweepResult& sweep);
void write_run_summary(JsonWriter& w, const MonitoringRun& run);

std::string sweep_to_csv(const SweepResult& sweep);            // s,value,rhs_zero,shift_c
std::string bounds_to_csv(const std::vector<BoundReport>& r); // one row per report
std::string run_to_csv(const MonitoringRun& run);              // n,increment,cumulative

}  // namespace qdet
