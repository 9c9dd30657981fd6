/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "peclsim/scenario.hpp"

#include "peclsim/error.hpp"
#include "peclsim/text_format.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace peclsim {

std::string_view to_string(ScenarioKind kind) noexcept {
    return kind == ScenarioKind::Testbed ? "testbed" : "loopback";
}

std::string_view to_string(PatternKind kind) noexcept {
    switch (kind) {
    case PatternKind::Prbs: return "prbs";
    case PatternKind::Alternating: return "alternating";
    case PatternKind::AllOnes: return "all_ones";
    case PatternKind::AllZeros: return "all_zeros";
    case PatternKind::Custom: return "custom";
    }
    return "prbs";
}

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
    throw Error(Errc::ConfigInvalid, field + ": " + why);
}

std::vector<Bit> parse_bits(const std::string& text, const std::string& field) {
    std::vector<Bit> bits;
    for (char c : text) {
        if (c == '0' || c == '1')
            bits.push_back(static_cast<Bit>(c - '0'));
        else if (c != '_' && c != ' ')
            invalid(field, "bit strings may contain only 0, 1, '_' and spaces");
    }
    return bits;
}

/// Reads one mapping node and remembers which keys were consumed.
class Section {
public:
    Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
        if (node_ && !node_.IsNull() && !node_.IsMap())
            invalid(path_.empty() ? "<root>" : path_, "expected a mapping");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    template <class T>
    std::optional<T> get(const std::string& key) {
        seen_.insert(key);
        if (!node_ || node_.IsNull())
            return std::nullopt;
        const YAML::Node v = node_[key];
        if (!v || v.IsNull())
            return std::nullopt;
        try {
            return v.as<T>();
        } catch (const YAML::Exception&) {
            invalid(field(key), "cannot read value '" + (v.IsScalar() ? v.Scalar() : std::string("<node>")) + "'");
        }
    }

    template <class T>
    void read(const std::string& key, T& out) {
        if (auto v = get<T>(key))
            out = *v;
    }

    /// Bit string "1101" or list [1, 1, 0, 1].
    std::optional<std::vector<Bit>> bits(const std::string& key) {
        seen_.insert(key);
        if (!node_ || node_.IsNull())
            return std::nullopt;
        const YAML::Node v = node_[key];
        if (!v || v.IsNull())
            return std::nullopt;
        if (v.IsScalar())
            return parse_bits(v.Scalar(), field(key));
        if (!v.IsSequence())
            invalid(field(key), "expected a bit string or list");
        std::vector<Bit> out;
        for (const auto& b : v) {
            const std::string text = b.IsScalar() ? b.Scalar() : std::string();
            if (text != "0" && text != "1")
                invalid(field(key), "list entries must be 0 or 1");
            out.push_back(static_cast<Bit>(text[0] - '0'));
        }
        return out;
    }

    Section child(const std::string& key) {
        seen_.insert(key);
        if (!node_ || node_.IsNull())
            return Section(YAML::Node(), field(key));
        return Section(node_[key], field(key));
    }

    void finish() const {
        if (!node_ || !node_.IsMap())
            return;
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!seen_.count(key))
                invalid(field(key), "unknown key");
        }
    }

private:
    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class E>
E parse_enum(const std::optional<std::string>& text, const std::map<std::string, E>& names, E fallback,
             const std::string& field) {
    if (!text)
        return fallback;
    const auto it = names.find(*text);
    if (it == names.end())
        invalid(field, "unknown value '" + *text + "'");
    return it->second;
}

void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok)
        invalid(field, why);
}

} // namespace

void ScenarioConfig::validate() const {
    require(data_rate > 0.0 && data_rate <= kMaxDataRate, "data_rate",
            "must be in (0, " + format_roundtrip(kMaxDataRate) + "] bps, got " + format_roundtrip(data_rate));
    require(n_bits >= 1, "n_bits", "must be at least 1");
    if (kind == ScenarioKind::Loopback)
        require(n_bits % 16 == 0, "n_bits", "loopback needs a multiple of 16 bits for the 8:1 + 2:1 chain");
    else
        require(n_bits % 8 == 0 && n_bits % pattern.frame_divisor == 0, "n_bits",
                "testbed needs a multiple of 8 and of pattern.frame_divisor");
    require(sites >= 1, "sites", "must be at least 1");
    require(sample_dt > 0.0, "sample_dt_ps", "must be positive");

    if (pattern.kind == PatternKind::Prbs) {
        try {
            pattern.lfsr.validate();
        } catch (const Error& e) {
            invalid(e.code() == Errc::InvalidSeed ? "pattern.seed" : "pattern.taps", e.detail());
        }
    }
    if (pattern.kind == PatternKind::Custom)
        require(!pattern.custom_bits.empty(), "pattern.bits", "custom pattern needs at least one bit");
    require(pattern.frame_divisor >= 1, "pattern.frame_divisor", "must be at least 1");
    for (Bit b : pattern.header_bits)
        require(b <= 1, "pattern.header_bits", "header bits must be 0 or 1");

    require(edges.resolution > 0.0, "edges.resolution_ps", "must be positive");
    require(edges.range >= edges.resolution, "edges.range_ps", "must be at least the resolution");
    require(jitter.rj_rms >= 0.0, "jitter.rj_rms_ps", "must be non-negative");
    require(jitter.dj_pp >= 0.0, "jitter.dj_pp_ps", "must be non-negative");

    require(levels.t_rise_2080 > 0.0, "levels.t_rise_2080_ps", "must be positive");
    require(levels.t_fall_2080 > 0.0, "levels.t_fall_2080_ps", "must be positive");
    require(levels.high_step > 0.0, "levels.high_step_mv", "must be positive");
    require(levels.swing_step > 0.0, "levels.swing_step_mv", "must be positive");
    require(levels.v_high > levels.v_low, "levels.v_high_mv", "must exceed levels.v_low_mv");
    try {
        (void)adjusted_levels();
    } catch (const Error& e) {
        invalid("levels.high_steps", e.detail());
    }
    require(sample_dt <= std::min(levels.t_rise_2080, levels.t_fall_2080) / 10.0, "sample_dt_ps",
            "must not exceed a tenth of the faster 20-80 % transition time");

    require(channel.delay >= 0.0, "channel.delay_ps", "must be non-negative");
    require(channel.attenuation_db >= 0.0, "channel.attenuation_db", "must be non-negative");
    require(!channel.bandwidth_ghz || *channel.bandwidth_ghz > 0.0, "channel.bandwidth_ghz", "must be positive");

    require(sampler.strobe_resolution > 0.0, "sampler.strobe_resolution_ps", "must be positive");
    require(sampler.strobe_range >= sampler.strobe_resolution, "sampler.strobe_range_ps",
            "must be at least the strobe resolution");
    require(sampler.threshold_lsb > 0.0, "sampler.threshold_lsb_mv", "must be positive");
    require(sampler.threshold_max > sampler.threshold_min, "sampler.threshold_max_mv", "must exceed threshold_min_mv");
    require(!aperture_jitter_rms || *aperture_jitter_rms >= 0.0, "sampler.aperture_jitter_rms_ps",
            "must be non-negative");
    if (kind == ScenarioKind::Loopback)
        require(1e12 / data_rate > sampler.strobe_resolution, "sampler.strobe_resolution_ps",
                "must be finer than the bit period");

    for (std::size_t i : expected_flips)
        require(i < n_bits, "expected_flips", "index " + std::to_string(i) + " beyond n_bits");
    require(!limits.min_eye_opening_ui || (*limits.min_eye_opening_ui >= 0.0 && *limits.min_eye_opening_ui <= 1.0),
            "limits.min_eye_opening_ui", "must lie in [0, 1]");
    require(!limits.max_jitter_pp_ps || *limits.max_jitter_pp_ps >= 0.0, "limits.max_jitter_pp_ps",
            "must be non-negative");
    require(!output.directory.empty(), "output.directory", "must not be empty");
}

ScenarioConfig parse_scenario(std::string_view text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw Error(Errc::ConfigSyntaxError, e.what());
    }
    if (!root || !root.IsMap())
        throw Error(Errc::ConfigSyntaxError, "scenario must be a mapping");

    ScenarioConfig cfg;
    Section top(root, "");
    cfg.kind = parse_enum(top.get<std::string>("scenario"),
                          std::map<std::string, ScenarioKind>{{"testbed", ScenarioKind::Testbed},
                                                              {"loopback", ScenarioKind::Loopback}},
                          cfg.kind, "scenario");
    top.read("data_rate", cfg.data_rate);
    top.read("n_bits", cfg.n_bits);
    top.read("seed", cfg.seed);
    top.read("sample_dt_ps", cfg.sample_dt);
    top.read("sites", cfg.sites);
    top.read("expected_flips", cfg.expected_flips);

    {
        auto s = top.child("pattern");
        auto& p = cfg.pattern;
        p.kind = parse_enum(s.get<std::string>("kind"),
                            std::map<std::string, PatternKind>{{"prbs", PatternKind::Prbs},
                                                               {"alternating", PatternKind::Alternating},
                                                               {"all_ones", PatternKind::AllOnes},
                                                               {"all_zeros", PatternKind::AllZeros},
                                                               {"custom", PatternKind::Custom}},
                            p.kind, s.field("kind"));
        const auto degree = s.get<unsigned>("degree");
        const auto taps = s.get<std::vector<unsigned>>("taps");
        if (degree && !taps)
            invalid(s.field("taps"), "required when degree is given");
        if (degree)
            p.lfsr.degree = *degree;
        if (taps) {
            p.lfsr.taps = *taps;
            if (!degree)
                p.lfsr.degree = p.lfsr.taps.empty() ? 0 : *std::max_element(p.lfsr.taps.begin(), p.lfsr.taps.end());
        }
        if (auto seed = s.get<std::uint64_t>("seed"))
            p.lfsr.seed = *seed;
        else if (p.lfsr.degree >= 1 && p.lfsr.degree < 64)
            p.lfsr.seed = (std::uint64_t{1} << p.lfsr.degree) - 1;
        if (auto bits = s.bits("bits"))
            p.custom_bits = std::move(*bits);
        if (auto hb = s.bits("header_bits")) {
            if (hb->size() != 4)
                invalid(s.field("header_bits"), "needs exactly four bits");
            std::copy(hb->begin(), hb->end(), p.header_bits.begin());
        }
        s.read("frame_divisor", p.frame_divisor);
        s.finish();
    }
    {
        auto s = top.child("edges");
        double leading = 0.0, trailing = 0.0;
        s.read("leading_delay_ps", leading);
        s.read("trailing_delay_ps", trailing);
        s.read("resolution_ps", cfg.edges.resolution);
        s.read("range_ps", cfg.edges.range);
        s.finish();
        const EdgeProgram base = cfg.edges;
        try {
            cfg.edges.leading_delay = quantize_delay(leading, base);
        } catch (const Error& e) {
            invalid(s.field("leading_delay_ps"), e.detail());
        }
        try {
            cfg.edges.trailing_delay = quantize_delay(trailing, base);
        } catch (const Error& e) {
            invalid(s.field("trailing_delay_ps"), e.detail());
        }
    }
    {
        auto s = top.child("jitter");
        s.read("rj_rms_ps", cfg.jitter.rj_rms);
        s.read("dj_pp_ps", cfg.jitter.dj_pp);
        s.finish();
    }
    {
        auto s = top.child("levels");
        auto& l = cfg.levels;
        s.read("v_high_mv", l.v_high);
        s.read("v_low_mv", l.v_low);
        s.read("high_step_mv", l.high_step);
        s.read("swing_step_mv", l.swing_step);
        s.read("high_steps", cfg.high_steps);
        s.read("swing_steps", cfg.swing_steps);
        s.read("t_rise_2080_ps", l.t_rise_2080);
        s.read("t_fall_2080_ps", l.t_fall_2080);
        s.finish();
    }
    {
        auto s = top.child("channel");
        s.read("delay_ps", cfg.channel.delay);
        s.read("attenuation_db", cfg.channel.attenuation_db);
        cfg.channel.bandwidth_ghz = s.get<double>("bandwidth_ghz");
        s.finish();
    }
    {
        auto s = top.child("sampler");
        cfg.sampler_threshold = s.get<double>("threshold_mv");
        s.read("strobe_resolution_ps", cfg.sampler.strobe_resolution);
        s.read("strobe_range_ps", cfg.sampler.strobe_range);
        s.read("threshold_lsb_mv", cfg.sampler.threshold_lsb);
        s.read("threshold_min_mv", cfg.sampler.threshold_min);
        s.read("threshold_max_mv", cfg.sampler.threshold_max);
        cfg.aperture_jitter_rms = s.get<double>("aperture_jitter_rms_ps");
        s.finish();
    }
    {
        auto s = top.child("limits");
        cfg.limits.min_eye_opening_ui = s.get<double>("min_eye_opening_ui");
        cfg.limits.max_jitter_pp_ps = s.get<double>("max_jitter_pp_ps");
        s.read("max_bit_errors", cfg.limits.max_bit_errors);
        s.finish();
    }
    {
        auto s = top.child("output");
        s.read("directory", cfg.output.directory);
        s.read("waveform", cfg.output.waveform);
        s.read("eye_histogram", cfg.output.eye_histogram);
        s.read("capture", cfg.output.capture);
        s.finish();
    }
    top.finish();

    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::IoError, "cannot open " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str());
}

namespace {

std::string num(double v) { return format_roundtrip(v); }

std::string bits_string(std::span<const Bit> bits) {
    std::string s = "\"";
    for (Bit b : bits)
        s += static_cast<char>('0' + b);
    return s + "\"";
}

template <class T>
std::string list(const std::vector<T>& items) {
    std::string s = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i)
            s += ", ";
        s += std::to_string(items[i]);
    }
    return s + "]";
}

std::string quoted(const std::string& text) {
    std::string s = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\')
            s += '\\';
        s += c;
    }
    return s + "\"";
}

} // namespace

std::vector<std::pair<std::string, std::string>> flatten_scenario(const ScenarioConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> kv;
    const auto add = [&](std::string key, std::string value) { kv.emplace_back(std::move(key), std::move(value)); };
    add("scenario", std::string(to_string(cfg.kind)));
    add("data_rate", num(cfg.data_rate));
    add("n_bits", std::to_string(cfg.n_bits));
    add("seed", std::to_string(cfg.seed));
    add("sample_dt_ps", num(cfg.sample_dt));
    add("sites", std::to_string(cfg.sites));
    add("expected_flips", list(cfg.expected_flips));

    const auto& p = cfg.pattern;
    add("pattern.kind", std::string(to_string(p.kind)));
    add("pattern.degree", std::to_string(p.lfsr.degree));
    add("pattern.taps", list(p.lfsr.taps));
    add("pattern.seed", std::to_string(p.lfsr.seed));
    if (!p.custom_bits.empty())
        add("pattern.bits", bits_string(p.custom_bits));
    add("pattern.header_bits", bits_string(p.header_bits));
    add("pattern.frame_divisor", std::to_string(p.frame_divisor));

    add("edges.leading_delay_ps", num(cfg.edges.leading_delay));
    add("edges.trailing_delay_ps", num(cfg.edges.trailing_delay));
    add("edges.resolution_ps", num(cfg.edges.resolution));
    add("edges.range_ps", num(cfg.edges.range));

    add("jitter.rj_rms_ps", num(cfg.jitter.rj_rms));
    add("jitter.dj_pp_ps", num(cfg.jitter.dj_pp));

    const auto& l = cfg.levels;
    add("levels.v_high_mv", num(l.v_high));
    add("levels.v_low_mv", num(l.v_low));
    add("levels.high_step_mv", num(l.high_step));
    add("levels.swing_step_mv", num(l.swing_step));
    add("levels.high_steps", std::to_string(cfg.high_steps));
    add("levels.swing_steps", std::to_string(cfg.swing_steps));
    add("levels.t_rise_2080_ps", num(l.t_rise_2080));
    add("levels.t_fall_2080_ps", num(l.t_fall_2080));

    add("channel.delay_ps", num(cfg.channel.delay));
    add("channel.attenuation_db", num(cfg.channel.attenuation_db));
    if (cfg.channel.bandwidth_ghz)
        add("channel.bandwidth_ghz", num(*cfg.channel.bandwidth_ghz));

    if (cfg.sampler_threshold)
        add("sampler.threshold_mv", num(*cfg.sampler_threshold));
    add("sampler.strobe_resolution_ps", num(cfg.sampler.strobe_resolution));
    add("sampler.strobe_range_ps", num(cfg.sampler.strobe_range));
    add("sampler.threshold_lsb_mv", num(cfg.sampler.threshold_lsb));
    add("sampler.threshold_min_mv", num(cfg.sampler.threshold_min));
    add("sampler.threshold_max_mv", num(cfg.sampler.threshold_max));
    if (cfg.aperture_jitter_rms)
        add("sampler.aperture_jitter_rms_ps", num(*cfg.aperture_jitter_rms));

    if (cfg.limits.min_eye_opening_ui)
        add("limits.min_eye_opening_ui", num(*cfg.limits.min_eye_opening_ui));
    if (cfg.limits.max_jitter_pp_ps)
        add("limits.max_jitter_pp_ps", num(*cfg.limits.max_jitter_pp_ps));
    add("limits.max_bit_errors", std::to_string(cfg.limits.max_bit_errors));

    add("output.directory", quoted(cfg.output.directory));
    add("output.waveform", cfg.output.waveform ? "true" : "false");
    add("output.eye_histogram", cfg.output.eye_histogram ? "true" : "false");
    add("output.capture", cfg.output.capture ? "true" : "false");
    return kv;
}

std::string dump_scenario(const ScenarioConfig& cfg) {
    std::string out;
    std::string section;
    for (const auto& [key, value] : flatten_scenario(cfg)) {
        const auto dot = key.find('.');
        if (dot == std::string::npos) {
            out += key + ": " + value + "\n";
            continue;
        }
        const auto sec = key.substr(0, dot);
        if (sec != section) {
            out += sec + ":\n";
            section = sec;
        }
        out += "  " + key.substr(dot + 1) + ": " + value + "\n";
    }
    return out;
}

} // namespace peclsim
