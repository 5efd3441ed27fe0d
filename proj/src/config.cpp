#include "fbg/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

namespace fbg {

namespace {

struct KeyDesc {
    std::string_view section;
    std::string_view name;
    std::string_view doc;
    bool numeric;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, std::string_view)> set;  // throws std::invalid_argument on bad text
};

double parse_double(std::string_view s) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw std::invalid_argument("expected a number");
    return v;
}

std::int64_t parse_int(std::string_view s) {
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw std::invalid_argument("expected an integer");
    return v;
}

bool parse_bool(std::string_view s) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw std::invalid_argument("expected 'true' or 'false'");
}

#define FBG_DOUBLE(sec, key, doc)                                                  \
    KeyDesc {                                                                      \
        sec, #key, doc, true, [](const RunConfig& c) { return format_double(c.key); },  \
            [](RunConfig& c, std::string_view v) { c.key = parse_double(v); }     \
    }
#define FBG_INT(sec, key, doc)                                                        \
    KeyDesc {                                                                         \
        sec, #key, doc, true, [](const RunConfig& c) { return std::to_string(c.key); },    \
            [](RunConfig& c, std::string_view v) { c.key = parse_int(v); }           \
    }

const std::vector<KeyDesc>& keys() {
    static const std::vector<KeyDesc> k = {
        FBG_DOUBLE("grating", kappa0, "coupling coefficient at grating start [1/cm]"),
        FBG_DOUBLE("grating", alpha, "linear apodization slope of kappa [1/cm^2]"),
        FBG_DOUBLE("grating", delta, "detuning from the Bragg wavenumber [1/cm]"),
        FBG_DOUBLE("grating", gamma, "Kerr coefficient [cm/GW]"),
        FBG_DOUBLE("grating", length, "grating length [cm]"),
        FBG_DOUBLE("pulse", fwhm_ps, "input intensity FWHM [ps]"),
        FBG_DOUBLE("pulse", peak_intensity, "input peak intensity [GW/cm^2]"),
        FBG_DOUBLE("grid", dz, "cell size [cm]; dt = dz / v_g"),
        FBG_DOUBLE("grid", v_g, "group velocity [cm/ps]"),
        FBG_DOUBLE("grid", pad_before, "fibre ahead of the grating [cm]; pulse starts at its middle"),
        FBG_DOUBLE("grid", pad_after, "fibre behind the grating [cm]; 0 = automatic"),
        FBG_DOUBLE("grid", total_time, "simulated time [ps]; 0 = automatic"),
        FBG_INT("grid", checkpoint_stride, "steps between stored fields; 0 = ceil(sqrt(steps))"),
        FBG_INT("grid", record_every, "steps between observable samples"),
        KeyDesc{"grid", "splitting", "lie | strang", false,
                [](const RunConfig& c) { return std::string(to_string(c.splitting)); },
                [](RunConfig& c, std::string_view v) {
                    if (v != "lie" && v != "strang") throw std::invalid_argument("expected 'lie' or 'strang'");
                    c.splitting = splitting_from_string(v);
                }},
        KeyDesc{"measurement", "kind", "photon_number | homodyne", false,
                [](const RunConfig& c) { return std::string(to_string(c.kind)); },
                [](RunConfig& c, std::string_view v) {
                    if (v != "photon_number" && v != "homodyne")
                        throw std::invalid_argument("expected 'photon_number' or 'homodyne'");
                    c.kind = measurement_kind_from_string(v);
                }},
        FBG_DOUBLE("measurement", lo_phase, "local oscillator phase [rad], homodyne only"),
        FBG_DOUBLE("measurement", gate_threshold, "gate edge as a fraction of the pulse peak"),
        KeyDesc{"measurement", "gated", "true = detect the leading pulse only", false,
                [](const RunConfig& c) { return std::string(c.gated ? "true" : "false"); },
                [](RunConfig& c, std::string_view v) { c.gated = parse_bool(v); }},
        KeyDesc{"output", "directory", "output directory", false,
                [](const RunConfig& c) { return c.directory; },
                [](RunConfig& c, std::string_view v) { c.directory = std::string(v); }},
    };
    return k;
}

#undef FBG_DOUBLE
#undef FBG_INT

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string suggestion(std::string_view word, const std::vector<std::string_view>& candidates) {
    std::string_view best;
    std::size_t best_d = 3;  // only suggest close matches
    for (auto c : candidates) {
        const auto d = edit_distance(word, c);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best.empty() ? std::string{} : " (did you mean '" + std::string(best) + "'?)";
}

void require(bool ok, std::string_view key, const std::string& range) {
    if (!ok) throw ValidationError(std::string(key) + ": must be " + range);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

void validate(const RunConfig& c) {
    require(finite(c.kappa0) && c.kappa0 >= 0.0 && c.kappa0 <= 1e3, "kappa0", "in [0, 1000] 1/cm");
    require(finite(c.length) && c.length > 0.0 && c.length <= 1e3, "length", "in (0, 1000] cm");
    require(finite(c.alpha) && c.kappa0 + c.alpha * c.length >= 0.0, "alpha",
            "finite with kappa0 + alpha * length >= 0");
    require(finite(c.delta) && std::abs(c.delta) <= 1e3, "delta", "in [-1000, 1000] 1/cm");
    require(finite(c.gamma) && c.gamma >= 0.0 && c.gamma <= 1.0, "gamma", "in [0, 1] cm/GW");
    require(finite(c.fwhm_ps) && c.fwhm_ps > 0.0 && c.fwhm_ps <= 1e4, "fwhm_ps", "in (0, 10000] ps");
    require(finite(c.peak_intensity) && c.peak_intensity > 0.0 && c.peak_intensity <= 1e3, "peak_intensity",
            "in (0, 1000] GW/cm^2");
    require(finite(c.v_g) && c.v_g > 0.0 && c.v_g <= kSpeedOfLight, "v_g", "in (0, c] cm/ps");
    require(finite(c.dz) && c.dz > 0.0 && c.dz <= 1.0, "dz", "in (0, 1] cm");
    require(c.dz * 16.0 <= c.length, "dz", "at most length / 16");
    const double w = sech_width_from_fwhm(c.v_g * c.fwhm_ps);
    require(finite(c.pad_before) && c.pad_before >= 22.0 * w && c.pad_before <= 1e4, "pad_before",
            "at least 22 sech widths of the input pulse (" + format_double(22.0 * w) + " cm)");
    require(finite(c.pad_after) && c.pad_after >= 0.0 && c.pad_after <= 1e4, "pad_after", "in [0, 10000] cm");
    require(finite(c.total_time) && c.total_time >= 0.0 && c.total_time <= 1e6, "total_time",
            "in [0, 1e6] ps");
    const double cells = (c.pad_before + c.length + c.pad_after) / c.dz;
    require(cells <= 5e7, "dz", "coarse enough for at most 5e7 cells");
    require(c.checkpoint_stride >= 0, "checkpoint_stride", ">= 0");
    require(c.record_every >= 1, "record_every", ">= 1");
    require(finite(c.lo_phase), "lo_phase", "finite");
    require(finite(c.gate_threshold) && c.gate_threshold > 0.0 && c.gate_threshold < 1.0, "gate_threshold",
            "in (0, 1)");
    require(!c.directory.empty(), "directory", "non-empty");
}

RunConfig parse_config(std::string_view text) {
    RunConfig c;
    std::vector<std::string_view> sections;
    for (const auto& k : keys()) {
        if (std::find(sections.begin(), sections.end(), k.section) == sections.end()) sections.push_back(k.section);
    }
    std::string_view section;
    std::vector<std::string> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigParseError("unterminated section header", line_no);
            section = trim(line.substr(1, line.size() - 2));
            if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
                throw ConfigParseError("unknown section [" + std::string(section) + "]" + suggestion(section, sections),
                                       line_no);
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigParseError("expected 'key = value'", line_no);
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigParseError("missing key before '='", line_no);
        if (section.empty()) throw ConfigParseError("key '" + std::string(key) + "' outside any section", line_no);

        const KeyDesc* desc = nullptr;
        std::vector<std::string_view> names;
        for (const auto& k : keys()) {
            if (k.section != section) continue;
            names.push_back(k.name);
            if (k.name == key) desc = &k;
        }
        if (!desc) {
            throw ConfigParseError("unknown key '" + std::string(key) + "' in [" + std::string(section) + "]" +
                                       suggestion(key, names),
                                   line_no);
        }
        const std::string full = std::string(section) + "." + std::string(key);
        if (std::find(seen.begin(), seen.end(), full) != seen.end()) {
            throw ConfigParseError("duplicate key '" + std::string(key) + "'", line_no);
        }
        seen.push_back(full);
        try {
            desc->set(c, value);
        } catch (const std::invalid_argument& e) {
            throw ConfigParseError(std::string(key) + ": " + e.what() + ", got '" + std::string(value) + "'", line_no);
        }
    }
    validate(c);
    return c;
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    std::string_view section;
    for (const auto& k : keys()) {
        if (k.section != section) {
            if (!section.empty()) os << '\n';
            section = k.section;
            os << '[' << section << "]\n";
        }
        os << k.name << " = " << k.get(c) << '\n';
    }
    return os.str();
}

std::vector<ConfigEntry> config_entries(const RunConfig& c) {
    std::vector<ConfigEntry> out;
    for (const auto& k : keys()) {
        out.push_back({std::string(k.section), std::string(k.name), k.get(c), k.numeric});
    }
    return out;
}

std::string config_reference() {
    const RunConfig def;
    std::ostringstream os;
    std::string_view section;
    for (const auto& k : keys()) {
        if (k.section != section) {
            section = k.section;
            os << '[' << section << "]\n";
        }
        os << "  " << k.name << " = " << k.get(def) << "    # " << k.doc << '\n';
    }
    return os.str();
}

}  // namespace fbg
