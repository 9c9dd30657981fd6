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
#include "peclsim/pattern_gen.hpp"
#include "peclsim/sampler.hpp"
#include "peclsim/serializer.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace peclsim {

enum class ScenarioKind { Testbed, Loopback };
enum class PatternKind { Prbs, Alternating, AllOnes, AllZeros, Custom };

/// Highest data rate a scenario may request (bps).
inline constexpr double kMaxDataRate = 5.5e9;

struct PatternSpec {
    PatternKind kind = PatternKind::Prbs;
    LfsrSpec lfsr = LfsrSpec::prbs7();
    std::vector<Bit> custom_bits;
    std::array<Bit, 4> header_bits{1, 0, 1, 0};
    std::size_t frame_divisor = kDefaultFrameDivisor;
};

struct Limits {
    std::optional<double> min_eye_opening_ui;
    std::optional<double> max_jitter_pp_ps;
    std::size_t max_bit_errors = 0;
};

struct OutputOptions {
    std::string directory = "out";
    bool waveform = false;
    bool eye_histogram = false;
    bool capture = false;
};

/// One fully resolved simulated test run.
struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::Loopback;
    double data_rate = 5.0e9;
    std::size_t n_bits = 2048;
    std::uint64_t seed = 1;
    double sample_dt = 1.0; ///< ps, render resolution
    std::size_t sites = 1;
    PatternSpec pattern;
    EdgeProgram edges;
    JitterConfig jitter;       ///< seed is derived from `seed` at run time
    LevelConfig levels;        ///< before step adjustment
    int high_steps = 0;
    int swing_steps = 0;
    ChannelModel channel;
    SamplerConfig sampler;     ///< threshold used only when sampler_threshold is set
    std::optional<double> sampler_threshold;
    std::optional<double> aperture_jitter_rms;
    std::vector<std::size_t> expected_flips; ///< fault injection on the expected stream
    Limits limits;
    OutputOptions output;

    /// Levels after high/swing steps.
    LevelConfig adjusted_levels() const { return adjust_levels(levels, high_steps, swing_steps); }

    /// Throws ConfigInvalid naming the offending field.
    void validate() const;
};

/// Parses scenario text. Missing keys take defaults; unknown keys are rejected.
ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Resolved config as (dotted key, value) pairs in a fixed order.
std::vector<std::pair<std::string, std::string>> flatten_scenario(const ScenarioConfig& cfg);

/// Resolved config in scenario-file syntax; parse_scenario accepts it back.
std::string dump_scenario(const ScenarioConfig& cfg);

std::string_view to_string(ScenarioKind kind) noexcept;
std::string_view to_string(PatternKind kind) noexcept;

} // namespace peclsim
