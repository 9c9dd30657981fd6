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

#pragma once

#include "peclsim/serializer.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace peclsim {

/// Uniformly sampled voltage trace. Sample i sits at t0 + i * dt.
struct Waveform {
    std::vector<double> samples; ///< mV
    double dt = 1.0;             ///< ps
    double t0 = 0.0;             ///< ps

    double time_at(std::size_t i) const noexcept { return t0 + static_cast<double>(i) * dt; }
    double t_end() const noexcept { return time_at(samples.empty() ? 0 : samples.size() - 1); }
    double duration() const noexcept { return t_end() - t0; }

    /// Linear interpolation; t must lie in [t0, t_end()].
    double value_at(double t) const;

    void validate() const;

    bool operator==(const Waveform&) const = default;
};

struct JitterConfig {
    double rj_rms = 0.0; ///< ps, Gaussian sigma
    double dj_pp = 0.0;  ///< ps, span of the uniform bounded component
    std::uint64_t seed = 1;

    void validate() const;
};

/// PECL output levels and edge rates.
struct LevelConfig {
    double v_high = 2400.0;     ///< mV
    double v_low = 1600.0;      ///< mV
    double high_step = 100.0;   ///< mV per high-level step
    double swing_step = 200.0;  ///< mV per swing step
    double t_rise_2080 = 75.0;  ///< ps
    double t_fall_2080 = 75.0;  ///< ps

    double swing() const noexcept { return v_high - v_low; }
    double midpoint() const noexcept { return 0.5 * (v_high + v_low); }

    void validate() const;
};

/// Interposer / compliant-lead path: pure delay, flat loss, optional single-pole roll-off.
struct ChannelModel {
    double delay = 0.0;                  ///< ps
    double attenuation_db = 0.0;         ///< dB, >= 0
    std::optional<double> bandwidth_ghz; ///< -3 dB corner

    void validate() const;
};

/// Gaussian sigma of an erf edge whose 20-80 % time is t_2080.
double edge_sigma_for_2080(double t_2080);

/// Offsets each edge by rj_rms * N(0,1) + U(-dj_pp/2, dj_pp/2). The span grows
/// to cover displaced edges. Throws EdgeCollision if edges reorder.
EdgeSequence inject_jitter(const EdgeSequence& edges, const JitterConfig& cfg);

/// Superposes erf-shaped transitions between v_low and v_high over
/// [edges.t_start, edges.t_end]. The line sits at v_low before a leading
/// rising edge (at v_high if the first edge falls).
/// dt must not exceed min(t_rise, t_fall) / 10.
Waveform render_waveform(const EdgeSequence& edges, const LevelConfig& levels, double dt = 1.0);

/// Lowers v_high by high_steps * high_step, then narrows the swing by
/// swing_steps * swing_step about the (new) midpoint. Negative steps raise/widen.
LevelConfig adjust_levels(const LevelConfig& levels, int high_steps, int swing_steps);

Waveform channel_transfer(const Waveform& w, const ChannelModel& ch);

/// Text table: "# waveform dt_ps=.. t0_ps=.. samples=.." header, a column
/// header, then one "time_ps voltage_mv" row per sample.
void write_waveform(std::ostream& os, const Waveform& w);
Waveform read_waveform(std::istream& is);

} // namespace peclsim
