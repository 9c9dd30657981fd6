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

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace peclsim {

/// Comparator-based PECL sampler with a programmable strobe delay line and
/// a threshold DAC.
struct SamplerConfig {
    double threshold = 2000.0;         ///< mV
    double strobe_resolution = 10.0;   ///< ps
    double strobe_range = 10'000.0;    ///< ps
    double threshold_lsb = 1.0;        ///< mV per DAC code
    double threshold_min = 0.0;        ///< mV, DAC code 0
    double threshold_max = 4095.0;     ///< mV, top of the DAC scale
    std::optional<JitterConfig> aperture_jitter; ///< unset = ideal strobe

    void validate() const;
};

struct Capture {
    std::vector<double> strobe_times; ///< ps
    std::vector<Bit> decisions;

    void validate() const;
};

struct CaptureComparison {
    bool passed = false;
    std::size_t error_count = 0;
    std::vector<std::size_t> error_positions;
};

/// Voltage of a periodic signal at absolute time t (ps).
using PeriodicSource = std::function<double(double)>;

/// Decision is 1 iff the interpolated voltage at the strobe is >= threshold.
/// Strobe times must be strictly increasing multiples of the strobe resolution
/// inside the waveform span.
Capture strobe_sample(const Waveform& w, std::span<const double> times, const SamplerConfig& cfg);

/// Strobe times at the centre of each bit, offset by `delay` and snapped to
/// the strobe grid.
std::vector<double> bit_center_strobes(std::size_t n_bits, double bit_period, double delay,
                                       const SamplerConfig& cfg);

/// Equivalent-time reconstruction of one period.
///
/// For every strobe phase k * strobe_resolution in [0, period) the threshold
/// DAC is binary-searched, one comparison per source cycle, for the highest
/// code the signal still meets. The sample reports that code's level plus
/// half an LSB. Output dt is the strobe resolution and t0 is `origin`.
Waveform equivalent_time_scan(const PeriodicSource& source, double period, const SamplerConfig& cfg,
                              double origin = 0.0);

/// Wraps a rendered waveform covering at least one period as a PeriodicSource.
PeriodicSource periodic_source(Waveform w, double period);

CaptureComparison compare_capture(const BitPattern& expected, const Capture& got);

/// "# capture strobes=N" header, a column header, then "strobe_time_ps decision" rows.
void write_capture(std::ostream& os, const Capture& c);

} // namespace peclsim
