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

#include "peclsim/harness.hpp"

#include "peclsim/error.hpp"
#include "peclsim/random.hpp"
#include "peclsim/text_format.hpp"
#include "peclsim/version.hpp"

#include <algorithm>
#include <atomic>
#include <ostream>
#include <thread>

namespace peclsim {

std::uint64_t stream_seed(std::uint64_t scenario_seed, std::uint64_t stream) noexcept {
    return mix_seed(mix_seed(scenario_seed) + stream);
}

bool RunReport::passed() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

const EyeMetrics& RunReport::primary_eye() const {
    for (const auto& ch : channels)
        if (ch.eye)
            return *ch.eye;
    throw Error(Errc::InsufficientData, "report holds no eye metrics");
}

bool ParallelReport::passed() const {
    return std::all_of(sites.begin(), sites.end(), [](const SiteResult& s) { return s.passed(); });
}

namespace {

template <class F>
auto stage(const char* name, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const Error& e) {
        throw e.at_stage(name);
    }
}

BitPattern source_bits(const PatternSpec& p, std::size_t n, double rate) {
    switch (p.kind) {
    case PatternKind::Prbs: return prbs_generate(p.lfsr, n, rate);
    case PatternKind::Alternating: return fixed_pattern(FixedKind::Alternating, n, rate);
    case PatternKind::AllOnes: return fixed_pattern(FixedKind::AllOnes, n, rate);
    case PatternKind::AllZeros: return fixed_pattern(FixedKind::AllZeros, n, rate);
    case PatternKind::Custom: return fixed_pattern(FixedKind::Custom, n, rate, p.custom_bits);
    }
    throw Error(Errc::InvalidPattern, "unknown pattern kind");
}

/// Eye metrics, or nothing when the waveform has too few transitions to fold.
std::optional<EyeMetrics> try_eye(const Waveform& w, double period, std::optional<double> threshold,
                                  std::string& note) {
    return stage("eye", [&]() -> std::optional<EyeMetrics> {
        try {
            return compute_eye_metrics(w, period, threshold);
        } catch (const Error& e) {
            if (e.code() != Errc::InsufficientData && e.code() != Errc::LevelsUnresolved)
                throw;
            note = std::string(to_string(e.code())) + ": " + e.detail();
            return std::nullopt;
        }
    });
}

void add_eye_verdicts(RunReport& report, const ChannelResult& ch) {
    const auto& lim = report.config.limits;
    if (lim.min_eye_opening_ui) {
        Verdict v{ch.name + ".eye_opening", false, {}};
        if (ch.eye) {
            v.passed = !ch.eye->eye_closed && ch.eye->eye_opening_ui >= *lim.min_eye_opening_ui;
            v.detail = format_fixed(ch.eye->eye_opening_ui, 4) + " UI, limit " +
                       format_fixed(*lim.min_eye_opening_ui, 4);
        } else {
            v.detail = "no eye: " + ch.note;
        }
        report.verdicts.push_back(std::move(v));
    }
    if (lim.max_jitter_pp_ps) {
        Verdict v{ch.name + ".jitter_pp", false, {}};
        if (ch.eye) {
            v.passed = ch.eye->jitter_pp <= *lim.max_jitter_pp_ps;
            v.detail = format_fixed(ch.eye->jitter_pp, 3) + " ps, limit " + format_fixed(*lim.max_jitter_pp_ps, 3);
        } else {
            v.detail = "no eye: " + ch.note;
        }
        report.verdicts.push_back(std::move(v));
    }
}

EdgeSequence timed_edges(const BitPattern& bits, const ScenarioConfig& cfg, std::uint64_t stream) {
    const auto edges = stage("edges", [&] { return place_edges(bits, cfg.edges); });
    JitterConfig jit = cfg.jitter;
    jit.seed = stream_seed(cfg.seed, stream);
    return stage("jitter", [&] { return inject_jitter(edges, jit); });
}

} // namespace

RunReport run_testbed(const ScenarioConfig& cfg, RunArtifacts* artifacts) {
    stage("config", [&] { cfg.validate(); });
    if (cfg.kind != ScenarioKind::Testbed)
        throw Error(Errc::InvalidArgument, "scenario is not a testbed run", "config");
    RunReport report;
    report.config = cfg;
    report.version = PECLSIM_VERSION;
    const LevelConfig levels = stage("levels", [&] { return cfg.adjusted_levels(); });

    const VortexFrame frame = stage("pattern", [&] {
        const std::size_t n = cfg.n_bits;
        const auto source = source_bits(cfg.pattern, 4 * n, cfg.data_rate);
        std::array<std::vector<Bit>, 4> words;
        for (std::size_t i = 0; i < 4; ++i)
            words[i].assign(source.bits.begin() + static_cast<std::ptrdiff_t>(i * n),
                            source.bits.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
        return build_vortex_frame(words, cfg.pattern.header_bits, cfg.data_rate, cfg.pattern.frame_divisor);
    });

    struct Lane {
        std::string name;
        const BitPattern* bits;
        bool serialized; // produced by the 8:1 mux from DLC lanes
    };
    std::vector<Lane> lanes;
    for (std::size_t i = 0; i < 4; ++i)
        lanes.push_back({"data" + std::to_string(i), &frame.data_channels[i], true});
    lanes.push_back({"clock", &frame.clock_channel, true});
    lanes.push_back({"frame", &frame.frame_channel, false});
    for (std::size_t i = 0; i < 4; ++i)
        lanes.push_back({"header" + std::to_string(i), &frame.header_channels[i], false});

    for (std::size_t c = 0; c < lanes.size(); ++c) {
        const auto& lane = lanes[c];
        const BitPattern driven = lane.serialized ? stage("mux", [&] {
            const auto dlc = demux_stage(*lane.bits, 8);
            return mux_stage(dlc);
        })
                                                  : *lane.bits;
        const auto edges = timed_edges(driven, cfg, c);
        const Waveform w = stage("render", [&] { return render_waveform(edges, levels, cfg.sample_dt); });

        ChannelResult res{lane.name, driven.bit_rate, std::nullopt, {}};
        res.eye = try_eye(w, driven.period_ps(), std::nullopt, res.note);
        if (c == 0 && artifacts) {
            artifacts->eye = stage("eye", [&] {
                return fold_eye(w, driven.period_ps(), res.eye ? res.eye->threshold : levels.midpoint());
            });
            artifacts->waveform = w;
            artifacts->capture.reset();
        }
        if (lane.name.rfind("data", 0) == 0)
            add_eye_verdicts(report, res);
        report.channels.push_back(std::move(res));
    }
    return report;
}

RunReport run_loopback(const ScenarioConfig& cfg, RunArtifacts* artifacts) {
    stage("config", [&] { cfg.validate(); });
    if (cfg.kind != ScenarioKind::Loopback)
        throw Error(Errc::InvalidArgument, "scenario is not a loopback run", "config");
    RunReport report;
    report.config = cfg;
    report.version = PECLSIM_VERSION;
    const LevelConfig levels = stage("levels", [&] { return cfg.adjusted_levels(); });

    const BitPattern stream = stage("pattern", [&] { return source_bits(cfg.pattern, cfg.n_bits, cfg.data_rate); });
    const BitPattern serial = stage("mux", [&] { return serialize_two_stage(split_two_stage(stream)); });
    const auto edges = timed_edges(serial, cfg, 0);
    const Waveform driven = stage("render", [&] { return render_waveform(edges, levels, cfg.sample_dt); });
    const Waveform received = stage("channel", [&] { return channel_transfer(driven, cfg.channel); });

    SamplerConfig sampler = cfg.sampler;
    sampler.threshold = cfg.sampler_threshold.value_or(levels.midpoint());
    if (cfg.aperture_jitter_rms)
        sampler.aperture_jitter = JitterConfig{*cfg.aperture_jitter_rms, 0.0, stream_seed(cfg.seed, 1000)};
    const double period = serial.period_ps();
    const Capture capture = stage("sample", [&] {
        const double offset = cfg.channel.delay + 0.5 * (cfg.edges.leading_delay + cfg.edges.trailing_delay);
        const auto strobes = bit_center_strobes(serial.size(), period, offset, sampler);
        return strobe_sample(received, strobes, sampler);
    });

    BitPattern expected = stream;
    for (std::size_t i : cfg.expected_flips)
        expected.bits[i] ^= 1U;
    const auto cmp = stage("compare", [&] { return compare_capture(expected, capture); });

    ChannelResult res{"line", serial.bit_rate, std::nullopt, {}};
    res.eye = try_eye(received, period, std::nullopt, res.note);
    if (artifacts) {
        artifacts->eye = stage("eye", [&] {
            return fold_eye(received, period, res.eye ? res.eye->threshold : levels.midpoint());
        });
        artifacts->waveform = received;
        artifacts->capture = capture;
    }

    report.verdicts.push_back({"bit_errors", cmp.error_count <= cfg.limits.max_bit_errors,
                               std::to_string(cmp.error_count) + " errors, limit " +
                                   std::to_string(cfg.limits.max_bit_errors)});
    report.capture = cmp;
    add_eye_verdicts(report, res);
    report.channels.push_back(std::move(res));
    return report;
}

RunReport run_scenario(const ScenarioConfig& cfg, RunArtifacts* artifacts) {
    return cfg.kind == ScenarioKind::Testbed ? run_testbed(cfg, artifacts) : run_loopback(cfg, artifacts);
}

ParallelReport run_parallel(const ScenarioConfig& cfg, std::size_t n_sites, const SiteCustomizer& customize,
                            unsigned max_threads) {
    if (n_sites < 1)
        throw Error(Errc::InvalidArgument, "need at least one site", "config");
    if (cfg.kind != ScenarioKind::Loopback)
        throw Error(Errc::InvalidArgument, "parallel sites run loopback scenarios", "config");

    ParallelReport out;
    out.config = cfg;
    out.n_sites = n_sites;
    out.throughput_factor = static_cast<double>(n_sites);
    out.sites.resize(n_sites);

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < n_sites; i = next++) {
            SiteResult& site = out.sites[i];
            site.index = i;
            ScenarioConfig site_cfg = cfg;
            site_cfg.seed = site_seed(cfg.seed, i);
            site_cfg.sites = 1;
            site.seed = site_cfg.seed;
            try {
                if (customize)
                    customize(i, site_cfg);
                site.report = run_loopback(site_cfg);
            } catch (const std::exception& e) {
                site.error = e.what();
            }
        }
    };
    unsigned threads = max_threads ? max_threads : std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_sites));
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t)
        pool.emplace_back(worker);
    worker();
    pool.clear();
    return out;
}

namespace {

void kv(std::ostream& os, const std::string& key, const std::string& value) { os << key << " = " << value << '\n'; }

void write_body(std::ostream& os, const RunReport& r, const std::string& prefix) {
    for (const auto& ch : r.channels) {
        const std::string base = prefix + "channel." + ch.name + ".";
        kv(os, base + "bit_rate_bps", format_roundtrip(ch.bit_rate));
        if (ch.eye)
            write_metrics(os, *ch.eye, base);
        else
            kv(os, base + "note", ch.note);
    }
    if (r.capture) {
        kv(os, prefix + "capture.passed", r.capture->passed ? "true" : "false");
        kv(os, prefix + "capture.bit_errors", std::to_string(r.capture->error_count));
        std::string positions;
        constexpr std::size_t kShown = 64;
        for (std::size_t i = 0; i < r.capture->error_positions.size() && i < kShown; ++i)
            positions += (i ? "," : "") + std::to_string(r.capture->error_positions[i]);
        if (r.capture->error_positions.size() > kShown)
            positions += ",...";
        kv(os, prefix + "capture.error_positions", positions.empty() ? "none" : positions);
    }
    for (const auto& v : r.verdicts) {
        kv(os, prefix + "verdict." + v.name, v.passed ? "pass" : "fail");
        kv(os, prefix + "verdict." + v.name + ".detail", v.detail);
    }
}

} // namespace

void write_report(std::ostream& os, const RunReport& r) {
    os << "# peclsim run report\n";
    kv(os, "version", r.version);
    kv(os, "seed", std::to_string(r.config.seed));
    kv(os, "result", r.passed() ? "pass" : "fail");
    for (const auto& [key, value] : flatten_scenario(r.config))
        kv(os, "config." + key, value);
    write_body(os, r, "");
}

void write_report(std::ostream& os, const ParallelReport& r) {
    os << "# peclsim parallel report\n";
    kv(os, "version", PECLSIM_VERSION);
    kv(os, "sites", std::to_string(r.n_sites));
    kv(os, "throughput_factor", format_fixed(r.throughput_factor, 1));
    kv(os, "result", r.passed() ? "pass" : "fail");
    for (const auto& [key, value] : flatten_scenario(r.config))
        kv(os, "config." + key, value);
    for (const auto& s : r.sites) {
        const std::string prefix = "site." + std::to_string(s.index) + ".";
        kv(os, prefix + "seed", std::to_string(s.seed));
        kv(os, prefix + "result", s.passed() ? "pass" : "fail");
        if (s.report)
            write_body(os, *s.report, prefix);
        else
            kv(os, prefix + "error", s.error);
    }
}

} // namespace peclsim
