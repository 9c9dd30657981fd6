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

#include "peclsim/analog_model.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace peclsim {

/// A waveform folded onto one unit interval.
///
/// The fold origin is chosen so the circular mean of the threshold crossings
/// lands at period / 2; the eye centre is therefore phase 0 of every trace.
struct EyeRecord {
    double period = 0.0;       ///< ps
    double origin = 0.0;       ///< absolute time (ps) of phase 0 of the first trace
    double phase_step = 0.0;   ///< ps between trace points
    double threshold = 0.0;    ///< mV
    std::vector<std::vector<double>> traces; ///< one period each, sampled every phase_step
    std::vector<double> crossing_times;      ///< phases in [0, period)
};

struct EyeOpening {
    double ui = 1.0;
    bool closed = false; ///< jitter exceeded the period; ui reported as 0
};

struct JitterStats {
    double pp = 0.0;  ///< ps
    double rms = 0.0; ///< ps, population standard deviation
};

struct LevelEstimate {
    double v_high = 0.0;
    double v_low = 0.0;
    double midpoint = 0.0;
};

struct TransitionTimes {
    std::optional<double> rise; ///< mean low-to-high time, ps
    std::optional<double> fall; ///< mean high-to-low time, ps
    std::size_t rise_count = 0;
    std::size_t fall_count = 0;
};

struct EyeMetrics {
    double jitter_pp = 0.0;
    double jitter_rms = 0.0;
    double eye_opening_ui = 1.0;
    bool eye_closed = false;
    double eye_height = 0.0; ///< mV, vertical opening at the eye centre
    std::optional<double> rise_2080;
    std::optional<double> fall_2080;
    double threshold = 0.0;
    std::size_t crossings = 0;
};

/// Waveform must span at least three periods.
EyeRecord fold_eye(const Waveform& w, double period, double threshold);

JitterStats crossover_jitter(const EyeRecord& eye);
JitterStats crossover_jitter(std::span<const double> phases);

/// 1 - jitter_pp / period; a closed eye reports 0 with the flag set.
EyeOpening eye_opening(double period, double jitter_pp);

/// Modal levels of a 5 mV histogram, refined to the median of the modal bin.
LevelEstimate measure_levels(const Waveform& w);

inline constexpr double kLevelBinMv = 5.0;

/// Mean 20-80 % (by default) transition time per direction. Reference levels
/// come from measure_levels unless given.
TransitionTimes measure_transition_time(const Waveform& w, double low_frac = 0.2, double high_frac = 0.8,
                                        std::optional<LevelEstimate> levels = std::nullopt);

/// Full metric set. The threshold defaults to the measured midpoint.
EyeMetrics compute_eye_metrics(const Waveform& w, double period,
                               std::optional<double> threshold = std::nullopt);

/// "phase_ps voltage_mv count" rows, voltage binned to `voltage_bin` mV
/// lower edges, zero bins omitted, ordered by phase then voltage.
void write_eye_histogram(std::ostream& os, const EyeRecord& eye, double voltage_bin = kLevelBinMv);

/// Flat "key = value" lines, each key prefixed with `prefix`.
void write_metrics(std::ostream& os, const EyeMetrics& m, std::string_view prefix = {});

} // namespace peclsim
