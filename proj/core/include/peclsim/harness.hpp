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

#include "peclsim/eye_analysis.hpp"
#include "peclsim/sampler.hpp"
#include "peclsim/scenario.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace peclsim {

/// Scenario seed offset for site i of a parallel run.
constexpr std::uint64_t site_seed(std::uint64_t seed, std::size_t site) noexcept { return seed + site; }

/// Seed of an internal random stream (per channel, sampler aperture, ...).
std::uint64_t stream_seed(std::uint64_t scenario_seed, std::uint64_t stream) noexcept;

struct ChannelResult {
    std::string name;
    double bit_rate = 0.0;
    std::optional<EyeMetrics> eye; ///< unset when the channel has too few transitions
    std::string note;
};

struct Verdict {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct RunReport {
    ScenarioConfig config;
    std::vector<ChannelResult> channels;
    std::optional<CaptureComparison> capture;
    std::vector<Verdict> verdicts;
    std::string version;

    bool passed() const;
    /// Eye metrics of the primary channel: data0 for testbed, the received line for loopback.
    const EyeMetrics& primary_eye() const;
};

/// Heavy intermediate results kept only on request.
struct RunArtifacts {
    Waveform waveform; ///< primary channel (post-channel for loopback)
    EyeRecord eye;
    std::optional<Capture> capture;
};

/// pattern -> 8:1 mux -> edges -> jitter -> render -> eye, per frame channel.
RunReport run_testbed(const ScenarioConfig& cfg, RunArtifacts* artifacts = nullptr);

/// pattern -> 8:1 + 2:1 mux -> edges -> jitter -> render -> channel ->
/// bit-centre strobes -> compare, plus eye metrics of the received waveform.
RunReport run_loopback(const ScenarioConfig& cfg, RunArtifacts* artifacts = nullptr);

/// Dispatches on cfg.kind.
RunReport run_scenario(const ScenarioConfig& cfg, RunArtifacts* artifacts = nullptr);

struct SiteResult {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    std::optional<RunReport> report;
    std::string error; ///< set when the site raised
    bool passed() const { return report && report->passed(); }
};

struct ParallelReport {
    ScenarioConfig config; ///< base scenario before per-site seeds
    std::size_t n_sites = 0;
    double throughput_factor = 0.0; ///< ideal scaling: one tester per site
    std::vector<SiteResult> sites;  ///< ordered by site index
    bool passed() const;
};

using SiteCustomizer = std::function<void(std::size_t site, ScenarioConfig&)>;

/// Independent loopback runs, one per site, with scenario seed seed + site.
/// Sites run concurrently; a failing site does not stop the others.
ParallelReport run_parallel(const ScenarioConfig& cfg, std::size_t n_sites, const SiteCustomizer& customize = {},
                            unsigned max_threads = 0);

/// Flat "key = value" report, byte-stable for a fixed scenario.
void write_report(std::ostream& os, const RunReport& report);
void write_report(std::ostream& os, const ParallelReport& report);

} // namespace peclsim
