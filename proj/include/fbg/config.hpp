#pragma once

// Flat key/value run configuration:
//
//   [grating]      kappa0, alpha, delta, gamma, length
//   [pulse]        fwhm_ps, peak_intensity
//   [grid]         dz, v_g, pad_before, pad_after, total_time, checkpoint_stride,
//                  record_every, splitting
//   [measurement]  kind, lo_phase, gate_threshold, gated
//   [output]       directory
//
// Lines are `key = value`; `#` and `;` start comments. Unknown sections or keys
// are errors.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fbg/measurement.hpp"
#include "fbg/scheme.hpp"
#include "fbg/types.hpp"

namespace fbg {

class ConfigParseError : public std::runtime_error {
public:
    ConfigParseError(const std::string& msg, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

struct RunConfig {
    // [grating]
    double kappa0 = 10.0;    // 1/cm
    double alpha = 0.0;      // 1/cm^2
    // 1/cm. Launched as the carrier wavenumber offset of the input pulse; the
    // constant delta term of the equations is a pure phase gauge and is kept at 0.
    double delta = 15.0;
    double gamma = 0.018;    // cm/GW
    double length = 50.0;    // cm
    // [pulse]
    double fwhm_ps = 60.0;
    double peak_intensity = 4.5;  // GW/cm^2
    // [grid]
    double dz = 0.01;  // cm
    double v_g = kDefaultGroupVelocity;
    double pad_before = 15.0;  // cm of free fibre ahead of the grating
    double pad_after = 0.0;    // cm behind the grating; 0 = automatic
    double total_time = 0.0;   // ps; 0 = until the leading pulse clears the grating + 10%
    std::int64_t checkpoint_stride = 0;  // 0 = ceil(sqrt(n_steps))
    std::int64_t record_every = 100;
    Splitting splitting = Splitting::lie;
    // [measurement]
    MeasurementKind kind = MeasurementKind::photon_number;
    double lo_phase = 0.0;
    double gate_threshold = kDefaultGateThreshold;
    bool gated = true;
    // [output]
    std::string directory = "out";

    bool operator==(const RunConfig&) const = default;
};

/// Throws ValidationError naming the offending key and its allowed range.
void validate(const RunConfig& c);

RunConfig parse_config(std::string_view text);
std::string serialize_config(const RunConfig& c);

struct ConfigEntry {
    std::string section;
    std::string key;
    std::string value;  // as written by serialize_config
    bool numeric = false;
};

/// Every key of `c` in document order.
std::vector<ConfigEntry> config_entries(const RunConfig& c);

/// Help text listing every key with its default.
std::string config_reference();

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace fbg
