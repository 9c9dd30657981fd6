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

#include "peclsim/sampler.hpp"

#include "peclsim/error.hpp"
#include "peclsim/random.hpp"
#include "peclsim/text_format.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace peclsim {

void SamplerConfig::validate() const {
    if (!(strobe_resolution > 0.0))
        throw Error(Errc::InvalidArgument, "strobe resolution must be positive");
    if (!(strobe_range >= strobe_resolution))
        throw Error(Errc::InvalidArgument, "strobe range must cover at least one step");
    if (!(threshold_lsb > 0.0) || !(threshold_max > threshold_min))
        throw Error(Errc::InvalidArgument, "threshold DAC scale is empty");
    if (!std::isfinite(threshold))
        throw Error(Errc::InvalidArgument, "threshold must be finite");
    if (aperture_jitter)
        aperture_jitter->validate();
}

void Capture::validate() const {
    if (strobe_times.size() != decisions.size())
        throw Error(Errc::ShapeMismatch, "capture has mismatched strobe and decision counts");
    for (std::size_t i = 1; i < strobe_times.size(); ++i)
        if (!(strobe_times[i] > strobe_times[i - 1]))
            throw Error(Errc::InvalidArgument, "strobe times must be strictly increasing");
}

namespace {
bool on_grid(double t, double resolution) {
    const double steps = t / resolution;
    return std::abs(steps - std::round(steps)) <= 1e-9 * std::max(1.0, std::abs(steps));
}

class Strobe {
public:
    explicit Strobe(const SamplerConfig& cfg) {
        if (cfg.aperture_jitter && (cfg.aperture_jitter->rj_rms > 0.0 || cfg.aperture_jitter->dj_pp > 0.0)) {
            jitter_ = *cfg.aperture_jitter;
            rng_.emplace(jitter_.seed);
        }
    }

    double displace(double t) {
        if (!rng_)
            return t;
        const double rj = jitter_.rj_rms * rng_->normal();
        return t + rj + rng_->uniform(-0.5 * jitter_.dj_pp, 0.5 * jitter_.dj_pp);
    }

private:
    JitterConfig jitter_;
    std::optional<Rng> rng_;
};
} // namespace

Capture strobe_sample(const Waveform& w, std::span<const double> times, const SamplerConfig& cfg) {
    cfg.validate();
    w.validate();
    Capture cap;
    cap.strobe_times.assign(times.begin(), times.end());
    cap.decisions.reserve(times.size());
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw Error(Errc::InvalidArgument, "strobe times must be strictly increasing");
    const double lo = w.t0;
    const double hi = w.t_end();
    const double eps = 1e-9 * std::max(1.0, std::abs(hi));
    Strobe strobe(cfg);
    for (double t : times) {
        if (!on_grid(t, cfg.strobe_resolution))
            throw Error(Errc::QuantizationError, "strobe at " + std::to_string(t) + " ps is off the " +
                                                     std::to_string(cfg.strobe_resolution) + " ps grid");
        if (t < lo - eps || t > hi + eps)
            throw Error(Errc::OutOfRange, "strobe at " + std::to_string(t) + " ps outside the waveform");
        const double at = std::clamp(strobe.displace(t), lo, hi);
        cap.decisions.push_back(w.value_at(at) >= cfg.threshold ? Bit{1} : Bit{0});
    }
    return cap;
}

std::vector<double> bit_center_strobes(std::size_t n_bits, double bit_period, double delay,
                                       const SamplerConfig& cfg) {
    cfg.validate();
    if (!(bit_period > cfg.strobe_resolution))
        throw Error(Errc::QuantizationError, "bit period is not resolvable on the strobe grid");
    std::vector<double> out(n_bits);
    for (std::size_t k = 0; k < n_bits; ++k) {
        const double centre = (static_cast<double>(k) + 0.5) * bit_period + delay;
        out[k] = std::round(centre / cfg.strobe_resolution) * cfg.strobe_resolution;
    }
    return out;
}

Waveform equivalent_time_scan(const PeriodicSource& source, double period, const SamplerConfig& cfg,
                              double origin) {
    cfg.validate();
    if (!(period > 0.0))
        throw Error(Errc::InvalidArgument, "period must be positive");
    if (period > cfg.strobe_range)
        throw Error(Errc::RangeExceeded, std::to_string(period) + " ps period exceeds the " +
                                             std::to_string(cfg.strobe_range) + " ps strobe range");
    const auto phases = static_cast<std::size_t>(std::ceil(period / cfg.strobe_resolution - 1e-9));
    const auto top_code = static_cast<long>(std::floor((cfg.threshold_max - cfg.threshold_min) / cfg.threshold_lsb));
    Waveform out{std::vector<double>(phases), cfg.strobe_resolution, origin};
    Strobe strobe(cfg);
    double cycle_start = origin;
    for (std::size_t k = 0; k < phases; ++k) {
        const double phase = static_cast<double>(k) * cfg.strobe_resolution;
        // Highest code whose level the signal meets; -1 if below code 0.
        long lo = -1, hi = top_code;
        while (lo < hi) {
            const long mid = lo + (hi - lo + 1) / 2;
            const double level = cfg.threshold_min + static_cast<double>(mid) * cfg.threshold_lsb;
            const bool one = source(strobe.displace(cycle_start + phase)) >= level;
            cycle_start += period;
            if (one)
                lo = mid;
            else
                hi = mid - 1;
        }
        const double code_level = cfg.threshold_min + static_cast<double>(std::max(lo, 0L)) * cfg.threshold_lsb;
        out.samples[k] = lo < 0 ? cfg.threshold_min : code_level + 0.5 * cfg.threshold_lsb;
    }
    return out;
}

PeriodicSource periodic_source(Waveform w, double period) {
    w.validate();
    if (!(period > 0.0) || w.duration() + 1e-9 < period)
        throw Error(Errc::InsufficientData, "waveform does not cover one period");
    return [w = std::move(w), period](double t) {
        double phase = std::fmod(t - w.t0, period);
        if (phase < 0.0)
            phase += period;
        return w.value_at(w.t0 + phase);
    };
}

CaptureComparison compare_capture(const BitPattern& expected, const Capture& got) {
    got.validate();
    if (expected.size() != got.decisions.size())
        throw Error(Errc::ShapeMismatch, "expected " + std::to_string(expected.size()) + " bits, captured " +
                                             std::to_string(got.decisions.size()));
    CaptureComparison cmp;
    for (std::size_t i = 0; i < expected.size(); ++i)
        if (expected.bits[i] != got.decisions[i])
            cmp.error_positions.push_back(i);
    cmp.error_count = cmp.error_positions.size();
    cmp.passed = cmp.error_count == 0;
    return cmp;
}

void write_capture(std::ostream& os, const Capture& c) {
    c.validate();
    os << "# capture strobes=" << c.strobe_times.size() << '\n';
    os << "strobe_time_ps decision\n";
    for (std::size_t i = 0; i < c.strobe_times.size(); ++i)
        os << format_roundtrip(c.strobe_times[i]) << ' ' << static_cast<int>(c.decisions[i]) << '\n';
}

} // namespace peclsim
