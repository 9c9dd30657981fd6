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

#include "peclsim/analog_model.hpp"
#include "peclsim/eye_analysis.hpp"

#include "test_helpers.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace peclsim;
using testutil::code_of;

namespace {

EdgeSequence alternating_edges(std::size_t n_bits, double rate) {
    BitPattern p{std::vector<Bit>(n_bits), rate};
    for (std::size_t i = 0; i < n_bits; ++i)
        p.bits[i] = static_cast<Bit>(i % 2 == 0);
    return place_edges(p, EdgeProgram{});
}

std::vector<double> offsets(const EdgeSequence& before, const EdgeSequence& after) {
    std::vector<double> d(before.edges.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = after.edges[i].time_ps - before.edges[i].time_ps;
    return d;
}

double rms(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x)
        m += v;
    m /= static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x)
        s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size()));
}

EdgeSequence single_edge(EdgeDir dir, double at, double span) {
    EdgeSequence s;
    s.t_start = 0.0;
    s.t_end = span;
    s.edges.push_back({at, dir});
    return s;
}

/// Brute-force crossing time of `level` on a monotone stretch by bisection.
double bisect(const Waveform& w, double level, double lo, double hi, bool rising) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const bool above = w.value_at(mid) >= level;
        if (above == rising)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST(InjectJitter, ZeroJitterIsIdentity) {
    const auto edges = alternating_edges(500, 2.5e9);
    EXPECT_EQ(inject_jitter(edges, JitterConfig{0.0, 0.0, 42}), edges);
}

TEST(InjectJitter, GaussianRmsWithinFivePercent) {
    const auto edges = alternating_edges(100'001, 1e9);
    ASSERT_GE(edges.edges.size(), 100'000U);
    for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
        const auto out = inject_jitter(edges, JitterConfig{3.2, 0.0, seed});
        EXPECT_NEAR(rms(offsets(edges, out)), 3.2, 0.05 * 3.2) << "seed " << seed;
    }
}

TEST(InjectJitter, BoundedComponentStaysInsideSpan) {
    const auto edges = alternating_edges(100'001, 1e9);
    const auto out = inject_jitter(edges, JitterConfig{0.0, 24.0, 5});
    const auto d = offsets(edges, out);
    const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
    EXPECT_LE(*hi - *lo, 24.0);
    EXPECT_GE(*lo, -12.0);
    EXPECT_LE(*hi, 12.0);
    // Histogram of offsets: ten equal bins, each within 10 % of n/10.
    std::vector<std::size_t> bins(10, 0);
    for (double v : d)
        ++bins[std::min<std::size_t>(9, static_cast<std::size_t>((v + 12.0) / 2.4))];
    const double expected = static_cast<double>(d.size()) / 10.0;
    for (std::size_t b = 0; b < bins.size(); ++b)
        EXPECT_NEAR(static_cast<double>(bins[b]), expected, 0.1 * expected) << "bin " << b;
    EXPECT_NEAR(rms(d), 24.0 / std::sqrt(12.0), 0.05 * 24.0 / std::sqrt(12.0));
}

TEST(InjectJitter, ReproducibleForFixedSeed) {
    const auto edges = alternating_edges(2000, 2.5e9);
    const JitterConfig cfg{3.2, 10.0, 1234};
    EXPECT_EQ(inject_jitter(edges, cfg), inject_jitter(edges, cfg));
    EXPECT_NE(inject_jitter(edges, cfg), inject_jitter(edges, JitterConfig{3.2, 10.0, 1235}));
}

TEST(InjectJitter, ReorderingIsACollision) {
    const auto edges = alternating_edges(2000, 5e9);
    EXPECT_EQ(code_of([&] { inject_jitter(edges, JitterConfig{0.0, 450.0, 1}); }), Errc::EdgeCollision);
}

TEST(Render, NoEdgesSitsAtLowLevel) {
    EdgeSequence s;
    s.t_end = 1000.0;
    const auto w = render_waveform(s, LevelConfig{}, 1.0);
    EXPECT_EQ(w.samples.size(), 1001U);
    EXPECT_TRUE(std::all_of(w.samples.begin(), w.samples.end(), [](double v) { return v == 1600.0; }));
}

TEST(Render, TransitionTimesMatchConfiguration) {
    for (double tr : {75.0, 120.0}) {
        LevelConfig lv;
        lv.t_rise_2080 = tr;
        lv.t_fall_2080 = tr;
        const auto w = render_waveform(single_edge(EdgeDir::Rising, 1000.0, 2000.0), lv, 1.0);
        const auto tt = measure_transition_time(w);
        ASSERT_TRUE(tt.rise);
        EXPECT_NEAR(*tt.rise, tr, 0.02 * tr);
        // Independent check by bisection against the configured levels.
        const double t20 = bisect(w, 1600.0 + 0.2 * 800.0, 500.0, 1000.0, true);
        const double t80 = bisect(w, 1600.0 + 0.8 * 800.0, 1000.0, 1500.0, true);
        EXPECT_NEAR(t80 - t20, tr, 0.02 * tr);
        // The 50 % point sits on the edge time.
        EXPECT_NEAR(w.value_at(1000.0), 2000.0, 1e-9);
    }
}

TEST(Render, TransitionRecoveryAcrossRange) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> pick(50.0, 200.0);
    for (int trial = 0; trial < 20; ++trial) {
        LevelConfig lv;
        lv.t_rise_2080 = pick(rng);
        lv.t_fall_2080 = pick(rng);
        BitPattern p{{0, 1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0}, 1e9};
        const auto w = render_waveform(place_edges(p, EdgeProgram{}), lv, 1.0);
        const auto tt = measure_transition_time(w);
        ASSERT_TRUE(tt.rise && tt.fall);
        EXPECT_NEAR(*tt.rise, lv.t_rise_2080, 0.02 * lv.t_rise_2080);
        EXPECT_NEAR(*tt.fall, lv.t_fall_2080, 0.02 * lv.t_fall_2080);
    }
}

TEST(Render, FirstFallingEdgeStartsHigh) {
    const auto w = render_waveform(single_edge(EdgeDir::Falling, 500.0, 1000.0), LevelConfig{}, 1.0);
    EXPECT_EQ(w.samples.front(), 2400.0);
    EXPECT_EQ(w.samples.back(), 1600.0);
}

TEST(Render, CoarseResolutionRejected) {
    EXPECT_EQ(code_of([] { render_waveform(single_edge(EdgeDir::Rising, 500.0, 1000.0), LevelConfig{}, 8.0); }),
              Errc::ResolutionTooCoarse);
    EXPECT_NO_THROW(render_waveform(single_edge(EdgeDir::Rising, 500.0, 1000.0), LevelConfig{}, 7.5));
}

TEST(AdjustLevels, HighLevelSteps) {
    const LevelConfig base;
    const auto out = adjust_levels(base, 3, 0);
    EXPECT_EQ(out.v_high, base.v_high - 300.0);
    EXPECT_EQ(out.v_low, base.v_low);
}

TEST(AdjustLevels, SwingStepKeepsMidpoint) {
    const LevelConfig base;
    const auto out = adjust_levels(base, 0, 1);
    EXPECT_EQ(out.swing(), base.swing() - 200.0);
    EXPECT_EQ(out.midpoint(), base.midpoint());
}

TEST(AdjustLevels, ZeroStepsIsIdentity) {
    const LevelConfig base{2350.0, 1710.0, 100.0, 200.0, 70.0, 72.0};
    const auto out = adjust_levels(base, 0, 0);
    EXPECT_EQ(out.v_high, base.v_high);
    EXPECT_EQ(out.v_low, base.v_low);
}

TEST(AdjustLevels, CollapsedLevelsRejected) {
    EXPECT_EQ(code_of([] { adjust_levels(LevelConfig{}, 8, 0); }), Errc::InvalidLevels);
    EXPECT_EQ(code_of([] { adjust_levels(LevelConfig{}, 0, 4); }), Errc::InvalidLevels);
}

TEST(AdjustLevels, SwingOnlyPreservesMidpointExactly) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 1000; ++trial) {
        LevelConfig lv;
        lv.v_low = static_cast<double>(1000 + rng() % 1000);
        lv.v_high = lv.v_low + static_cast<double>(400 + rng() % 1200);
        const int steps = static_cast<int>(rng() % 3) - 1;
        const auto out = adjust_levels(lv, 0, steps);
        ASSERT_EQ(out.midpoint(), lv.midpoint());
    }
}

TEST(Channel, IdentityIsExact) {
    const auto w = render_waveform(alternating_edges(64, 4e9), LevelConfig{}, 1.0);
    EXPECT_EQ(channel_transfer(w, ChannelModel{}), w);
}

TEST(Channel, SixDbHalvesSwing) {
    const auto w = render_waveform(alternating_edges(64, 1e9), LevelConfig{}, 1.0);
    const auto out = channel_transfer(w, ChannelModel{0.0, 6.02, std::nullopt});
    const auto [lo, hi] = std::minmax_element(out.samples.begin(), out.samples.end());
    EXPECT_NEAR((*hi - *lo) / 800.0, 0.5, 1e-3);
    EXPECT_NEAR(0.5 * (*hi + *lo), 2000.0, 1e-9);
}

TEST(Channel, DelayShiftsTimeBase) {
    const auto w = render_waveform(alternating_edges(16, 1e9), LevelConfig{}, 1.0);
    const auto out = channel_transfer(w, ChannelModel{250.0, 0.0, std::nullopt});
    EXPECT_EQ(out.samples, w.samples);
    EXPECT_EQ(out.t0, w.t0 + 250.0);
}

TEST(Channel, AlternatingAt4GbpsKeepsFullSwing) {
    const auto w = render_waveform(alternating_edges(256, 4e9), LevelConfig{}, 1.0);
    const auto out = channel_transfer(w, ChannelModel{});
    const auto in_levels = measure_levels(w);
    const auto out_levels = measure_levels(out);
    EXPECT_GE((out_levels.v_high - out_levels.v_low) / (in_levels.v_high - in_levels.v_low), 0.99);
}

TEST(Channel, BandwidthLimitSettlesToInputLevels) {
    const auto w = render_waveform(single_edge(EdgeDir::Rising, 1000.0, 4000.0), LevelConfig{}, 1.0);
    const auto out = channel_transfer(w, ChannelModel{0.0, 0.0, 2.0});
    EXPECT_NEAR(out.samples.back(), 2400.0, 1e-6);
    // Slower edge after a 2 GHz pole.
    const auto tt_in = measure_transition_time(w);
    const auto tt_out = measure_transition_time(out);
    EXPECT_GT(*tt_out.rise, *tt_in.rise + 50.0);
}

TEST(WaveformText, RoundTripIsExact) {
    JitterConfig jc{3.2, 5.0, 8};
    const auto w = render_waveform(inject_jitter(alternating_edges(40, 2.5e9), jc), LevelConfig{}, 0.5);
    std::stringstream ss;
    write_waveform(ss, w);
    const auto back = read_waveform(ss);
    EXPECT_EQ(back, w);
}

TEST(WaveformText, HeaderCarriesDtAndT0) {
    const Waveform w{{1.0, 2.5}, 2.0, -4.0};
    std::stringstream ss;
    write_waveform(ss, w);
    EXPECT_EQ(ss.str(), "# waveform dt_ps=2 t0_ps=-4 samples=2\ntime_ps voltage_mv\n-4 1\n-2 2.5\n");
}
