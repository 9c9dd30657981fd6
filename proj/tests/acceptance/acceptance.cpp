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
// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance            run all criteria
//   acceptance 3 6        run only criteria 3 and 6
// Exit status is non-zero when any selected criterion fails.

#include "peclsim/analog_model.hpp"
#include "peclsim/error.hpp"
#include "peclsim/eye_analysis.hpp"
#include "peclsim/export.hpp"
#include "peclsim/harness.hpp"
#include "peclsim/pattern_gen.hpp"
#include "peclsim/serializer.hpp"
#include "peclsim/text_format.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace peclsim;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool passed = true;
    std::vector<std::string> lines; // evidence printed under the verdict

    void check(bool ok, std::string what) {
        passed = passed && ok;
        lines.push_back(std::string(ok ? "ok   " : "MISS ") + std::move(what));
    }
    void note(std::string what) { lines.push_back("     " + std::move(what)); }
};

std::string f(double v, int digits = 4) { return format_fixed(v, digits); }

// 1. Eye opening at the measured jitter of each eye diagram.
Outcome eye_openings() {
    struct Case {
        const char* label;
        ScenarioKind kind;
        double rate;
        double dj_pp;
        double expected;
        double t2080;
    };
    const Case cases[] = {
        {"testbed 2.5 Gbps, 46.7 ps", ScenarioKind::Testbed, 2.5e9, 46.7, 0.88, 75.0},
        {"testbed 4.0 Gbps, 47.2 ps", ScenarioKind::Testbed, 4.0e9, 47.2, 0.81, 75.0},
        {"loopback 1.0 Gbps, 50 ps", ScenarioKind::Loopback, 1.0e9, 50.0, 0.95, 75.0},
        {"loopback 5.0 Gbps, 50 ps", ScenarioKind::Loopback, 5.0e9, 50.0, 0.75, 75.0},
    };
    const auto run = [](const Case& c) {
        ScenarioConfig cfg;
        cfg.kind = c.kind;
        cfg.data_rate = c.rate;
        cfg.n_bits = 20480;
        cfg.sample_dt = 2.0;
        cfg.jitter.dj_pp = c.dj_pp;
        cfg.levels.t_rise_2080 = c.t2080;
        cfg.levels.t_fall_2080 = c.t2080;
        return run_scenario(cfg);
    };
    Outcome out;
    for (const auto& c : cases) {
        const auto t0 = Clock::now();
        const auto r = run(c);
        const double secs = seconds_since(t0);
        const auto& eye = r.primary_eye();
        out.check(std::abs(eye.eye_opening_ui - c.expected) <= 0.02,
                  std::string(c.label) + ": opening " + f(eye.eye_opening_ui) + " UI, expected " + f(c.expected, 2) +
                      " +/- 0.02");
        out.check(eye.crossings >= 10000, std::string(c.label) + ": " + std::to_string(eye.crossings) + " crossings");
        out.check(secs <= 10.0, std::string(c.label) + ": " + f(secs, 2) + " s");
    }
    // 50 ps is the total measured at 5 Gbps; slower edges add their own crossing spread on top.
    Case slow = cases[3];
    slow.t2080 = 120.0;
    const auto& eye = run(slow).primary_eye();
    out.note("same 5.0 Gbps run with 120 ps edges: opening " + f(eye.eye_opening_ui) + " UI, p-p " +
             f(eye.jitter_pp, 2) + " ps");
    return out;
}

// Edge-time deviations of 1e5 jittered falling edges from their nominal times.
JitterStats single_edge_jitter(double rj_rms, double dj_pp, std::uint64_t seed) {
    constexpr std::size_t kEdges = 100000;
    const auto pattern = fixed_pattern(FixedKind::Alternating, 2 * kEdges, 1e9);
    const auto ideal = place_edges(pattern, EdgeProgram{});
    const auto jittered = inject_jitter(ideal, JitterConfig{rj_rms, dj_pp, seed});
    std::vector<double> dev;
    dev.reserve(kEdges);
    for (std::size_t i = 0; i < ideal.edges.size(); ++i)
        if (ideal.edges[i].dir == EdgeDir::Falling)
            dev.push_back(jittered.edges[i].time_ps - ideal.edges[i].time_ps);
    if (dev.size() != kEdges)
        throw Error(Errc::InvalidArgument, "unexpected falling-edge count");
    return crossover_jitter(dev);
}

// 2. Single-edge jitter statistics.
Outcome single_edge() {
    Outcome out;
    const auto both = single_edge_jitter(3.2, 24.0, 9);
    out.check(std::abs(both.rms - 3.2) <= 0.05 * 3.2, "rj 3.2 + dj 24: rms " + f(both.rms, 3) + " ps, need 3.2 +/- 5%");
    out.check(both.pp <= 24.0, "rj 3.2 + dj 24: p-p " + f(both.pp, 3) + " ps, need <= 24");
    out.note("additive model expects rms sqrt(3.2^2 + 24^2/12) = " + f(std::sqrt(3.2 * 3.2 + 24.0 * 24.0 / 12.0), 3) +
             " ps");
    const auto rj = single_edge_jitter(3.2, 0.0, 9);
    const auto dj = single_edge_jitter(0.0, 24.0, 9);
    out.note("components alone: rj 3.2 -> rms " + f(rj.rms, 3) + ", p-p " + f(rj.pp, 3) + "; dj 24 -> rms " +
             f(dj.rms, 3) + ", p-p " + f(dj.pp, 3));
    return out;
}

// Midpoint crossing times of a rendered waveform, linearly interpolated.
std::vector<double> crossings(const Waveform& w, double level) {
    std::vector<double> t;
    for (std::size_t i = 1; i < w.samples.size(); ++i) {
        const double a = w.samples[i - 1] - level, b = w.samples[i] - level;
        if ((a < 0) != (b < 0))
            t.push_back(w.time_at(i - 1) + w.dt * a / (a - b));
    }
    return t;
}

// 3. Requested placements against quantized and rendered edges.
Outcome timing_accuracy() {
    constexpr double kRate = 2.5e9; // T = 400 ps
    constexpr std::size_t kHighBits = 30;
    std::vector<Bit> bits(kHighBits + 2, 1);
    bits.front() = 0;
    bits.back() = 0;
    const BitPattern pattern{bits, kRate};
    const double rise_nominal = pattern.period_ps();
    const double fall_nominal = pattern.period_ps() * static_cast<double>(kHighBits + 1);

    std::mt19937_64 gen(20240229);
    std::uniform_real_distribution<double> delay(0.0, 10000.0);
    const LevelConfig levels;
    double worst_q = 0.0, worst_e2e = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double lead = delay(gen), trail = delay(gen);
        const auto prog = EdgeProgram::make(lead, trail);
        worst_q = std::max({worst_q, std::abs(prog.leading_delay - lead), std::abs(prog.trailing_delay - trail)});
        const auto w = render_waveform(inject_jitter(place_edges(pattern, prog), JitterConfig{}), levels, 1.0);
        const auto t = crossings(w, levels.midpoint());
        if (t.size() != 2)
            throw Error(Errc::InvalidArgument, "expected one rising and one falling crossing");
        worst_e2e = std::max({worst_e2e, std::abs(t[0] - (rise_nominal + lead)), std::abs(t[1] - (fall_nominal + trail))});
    }
    Outcome out;
    out.check(worst_q <= 5.0, "quantization: worst " + f(worst_q, 3) + " ps over 2000 delays, limit 5");
    out.check(worst_e2e <= 25.0, "end to end: worst " + f(worst_e2e, 3) + " ps, limit 25");
    return out;
}

// 4. 20-80 % transition times.
Outcome transition_times() {
    Outcome out;
    const auto pattern = prbs_generate(LfsrSpec::prbs7(), 1024, 2.5e9);
    const auto edges = place_edges(pattern, EdgeProgram{});
    for (double t : {70.0, 75.0, 120.0}) {
        LevelConfig lv;
        lv.t_rise_2080 = t;
        lv.t_fall_2080 = t;
        const auto tt = measure_transition_time(render_waveform(edges, lv, 1.0));
        const double rise = tt.rise.value_or(NAN), fall = tt.fall.value_or(NAN);
        out.check(std::abs(rise - t) <= 0.02 * t, "rise " + f(t, 0) + " ps -> " + f(rise, 3));
        out.check(std::abs(fall - t) <= 0.02 * t, "fall " + f(t, 0) + " ps -> " + f(fall, 3));
    }
    return out;
}

// 5. Level steps recovered from rendered waveforms.
Outcome level_control() {
    Outcome out;
    const auto edges = place_edges(prbs_generate(LfsrSpec::prbs7(), 1024, 1e9), EdgeProgram{});
    const LevelConfig base;
    const auto measured = [&](const LevelConfig& lv) { return measure_levels(render_waveform(edges, lv, 1.0)); };
    const auto m0 = measured(base);
    double prev_high = m0.v_high;
    for (int k = 1; k <= 3; ++k) {
        const auto lv = adjust_levels(base, k, 0);
        const auto m = measured(lv);
        const double step = prev_high - m.v_high;
        out.check(std::abs(step - base.high_step) <= 0.01 * base.high_step,
                  "high step " + std::to_string(k) + ": v_high " + f(m.v_high, 3) + " mV, step " + f(step, 3) + " mV");
        out.check(std::abs(m.v_low - base.v_low) <= 0.01 * std::abs(base.v_low), "high step " + std::to_string(k) +
                                                                                 ": v_low " + f(m.v_low, 3) + " mV");
        prev_high = m.v_high;
    }
    const auto wide = adjust_levels(base, 0, 1);
    const auto m = measured(wide);
    const double swing = m.v_high - m.v_low;
    out.check(std::abs(swing - (base.swing() - base.swing_step)) <= 0.01 * base.swing_step,
              "swing step: " + f(m0.v_high - m0.v_low, 3) + " -> " + f(swing, 3) + " mV");
    out.check(wide.midpoint() == base.midpoint(), "swing step: configured midpoint " + f(wide.midpoint(), 6) + " mV");
    out.check(std::abs(m.midpoint - m0.midpoint) <= 1e-6,
              "swing step: measured midpoint " + f(m0.midpoint, 6) + " -> " + f(m.midpoint, 6) + " mV");
    return out;
}

// 6. Mux round trip and clean loopback.
Outcome mux_loopback() {
    Outcome out;
    std::mt19937_64 gen(6);
    std::size_t mismatches = 0;
    for (int set = 0; set < 1000; ++set) {
        const std::size_t len = 1 + gen() % 64;
        std::vector<BitPattern> chs(8, BitPattern{std::vector<Bit>(len), 625e6});
        for (auto& ch : chs)
            for (auto& b : ch.bits)
                b = static_cast<Bit>(gen() & 1U);
        if (demux_stage(mux_stage(chs), 8) != chs)
            ++mismatches;
    }
    out.check(mismatches == 0, "demux(mux(x)) == x on 1000 random 8-channel sets, " + std::to_string(mismatches) +
                                   " mismatches");

    ScenarioConfig cfg;
    cfg.data_rate = 5e9;
    cfg.n_bits = 16384;
    const auto r = run_loopback(cfg);
    out.check(r.capture && r.capture->error_count == 0,
              "5 Gbps loopback, identity channel, zero jitter: " + std::to_string(r.capture->error_count) +
                  " errors in " + std::to_string(cfg.n_bits) + " bits");
    return out;
}

// 7. PRBS-7 period by state enumeration.
Outcome prbs_period() {
    Outcome out;
    const auto spec = LfsrSpec::prbs7();
    Lfsr lfsr(spec);
    std::set<std::uint64_t> seen{lfsr.state()};
    std::size_t steps = 0;
    do {
        lfsr.next();
        ++steps;
    } while (lfsr.state() != spec.seed && steps < 1000);
    for (std::size_t i = 0; i < steps; ++i) {
        lfsr.next();
        seen.insert(lfsr.state());
    }
    out.check(steps == 127, "state returns to the seed after " + std::to_string(steps) + " steps");
    out.check(seen.size() == 127 && !seen.count(0), std::to_string(seen.size()) + " distinct non-zero states");

    const auto bits = prbs_generate(spec, 1016, 1e9).bits;
    std::size_t period = 0;
    for (std::size_t p = 1; p <= 508 && !period; ++p) {
        bool repeats = true;
        for (std::size_t i = 0; i + p < bits.size() && repeats; ++i)
            repeats = bits[i] == bits[i + p];
        if (repeats)
            period = p;
    }
    out.check(period == 127, "output stream period " + std::to_string(period));
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// 8. Reports exported twice from the same seed.
Outcome determinism() {
    Outcome out;
    const fs::path dir = fs::temp_directory_path() / "peclsim_acceptance";
    fs::create_directories(dir);

    ScenarioConfig loop;
    loop.n_bits = 4096;
    loop.seed = 42;
    loop.jitter = JitterConfig{2.5, 30.0, 0};
    loop.aperture_jitter_rms = 1.0;
    loop.channel.bandwidth_ghz = 12.0;
    ScenarioConfig bed = loop;
    bed.kind = ScenarioKind::Testbed;
    bed.data_rate = 2.5e9;
    bed.aperture_jitter_rms.reset();

    const std::vector<std::pair<std::string, std::function<void(const fs::path&)>>> runs{
        {"loopback", [&](const fs::path& p) { export_report(run_loopback(loop), p); }},
        {"testbed", [&](const fs::path& p) { export_report(run_testbed(bed), p); }},
        {"parallel", [&](const fs::path& p) { export_report(run_parallel(loop, 4), p); }},
    };
    for (const auto& [name, run] : runs) {
        run(dir / (name + "_a.txt"));
        run(dir / (name + "_b.txt"));
        const auto a = slurp(dir / (name + "_a.txt"));
        const auto b = slurp(dir / (name + "_b.txt"));
        out.check(!a.empty() && a == b, name + " report: " + std::to_string(a.size()) + " bytes, identical");
    }
    fs::remove_all(dir);
    return out;
}

struct Criterion {
    int id;
    const char* title;
    Outcome (*run)();
};

} // namespace

int main(int argc, char** argv) {
    const Criterion all[] = {
        {1, "eye opening at measured jitter", eye_openings},
        {2, "single-edge jitter statistics", single_edge},
        {3, "edge placement accuracy", timing_accuracy},
        {4, "20-80 % transition time recovery", transition_times},
        {5, "level control", level_control},
        {6, "mux round trip and loopback", mux_loopback},
        {7, "PRBS-7 period", prbs_period},
        {8, "report determinism", determinism},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i)
        only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.id))
            continue;
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.passed = false;
            o.lines.push_back(std::string("error: ") + e.what());
        }
        std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " ("
                  << f(seconds_since(t0), 2) << " s)\n";
        for (const auto& line : o.lines)
            std::cout << "    " << line << '\n';
        failed += o.passed ? 0 : 1;
    }
    std::cout.flush();
    return failed ? EXIT_FAILURE : EXIT_SUCCESS;
}
