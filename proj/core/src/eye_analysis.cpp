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

#include "peclsim/eye_analysis.hpp"

#include "peclsim/error.hpp"
#include "peclsim/text_format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <string>

namespace peclsim {

namespace {

double wrap(double x, double period) {
    double r = std::fmod(x, period);
    if (r < 0.0)
        r += period;
    if (r >= period)
        r = 0.0;
    return r;
}

/// Absolute threshold-crossing times, linearly interpolated.
std::vector<double> find_crossings(const Waveform& w, double threshold) {
    std::vector<double> out;
    const auto& v = w.samples;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const double a = v[i] - threshold;
        const double b = v[i + 1] - threshold;
        if ((a < 0.0) != (b < 0.0))
            out.push_back(w.time_at(i) + w.dt * a / (a - b));
    }
    return out;
}

} // namespace

EyeRecord fold_eye(const Waveform& w, double period, double threshold) {
    w.validate();
    if (!(period > 0.0))
        throw Error(Errc::InvalidArgument, "period must be positive");
    if (w.duration() < 3.0 * period)
        throw Error(Errc::InsufficientData, "waveform spans fewer than three periods");

    const auto crossings = find_crossings(w, threshold);

    // Circular mean of the crossing phases, referenced to t = 0.
    double origin_phase = 0.0;
    if (!crossings.empty()) {
        double s = 0.0, c = 0.0;
        for (double t : crossings) {
            const double theta = 2.0 * std::numbers::pi * wrap(t, period) / period;
            s += std::sin(theta);
            c += std::cos(theta);
        }
        const double mean_phase = wrap(std::atan2(s, c) / (2.0 * std::numbers::pi) * period, period);
        origin_phase = wrap(mean_phase - 0.5 * period, period);
    }

    EyeRecord eye;
    eye.period = period;
    eye.threshold = threshold;
    // Snapped to the sample grid so grid-aligned crossings fold without rounding.
    eye.origin = w.t0 + std::round(wrap(origin_phase - w.t0, period) / w.dt) * w.dt;

    const auto grid = static_cast<std::size_t>(std::max(1.0, std::round(period / w.dt)));
    eye.phase_step = period / static_cast<double>(grid);
    for (double start = eye.origin; start + period <= w.t_end() + 1e-9; start += period) {
        std::vector<double> trace(grid);
        for (std::size_t j = 0; j < grid; ++j)
            trace[j] = w.value_at(start + static_cast<double>(j) * eye.phase_step);
        eye.traces.push_back(std::move(trace));
    }

    eye.crossing_times.reserve(crossings.size());
    for (double t : crossings)
        eye.crossing_times.push_back(wrap(t - eye.origin, period));
    return eye;
}

JitterStats crossover_jitter(std::span<const double> phases) {
    if (phases.size() < 2)
        throw Error(Errc::InsufficientData, "need at least two crossings, have " + std::to_string(phases.size()));
    const auto [lo, hi] = std::minmax_element(phases.begin(), phases.end());
    double mean = 0.0;
    for (double p : phases)
        mean += p;
    mean /= static_cast<double>(phases.size());
    double var = 0.0;
    for (double p : phases)
        var += (p - mean) * (p - mean);
    var /= static_cast<double>(phases.size());
    return {*hi - *lo, std::sqrt(var)};
}

JitterStats crossover_jitter(const EyeRecord& eye) { return crossover_jitter(eye.crossing_times); }

EyeOpening eye_opening(double period, double jitter_pp) {
    if (!(period > 0.0) || !(jitter_pp >= 0.0))
        throw Error(Errc::InvalidArgument, "eye opening needs period > 0 and jitter >= 0");
    if (jitter_pp > period)
        return {0.0, true};
    return {1.0 - jitter_pp / period, false};
}

LevelEstimate measure_levels(const Waveform& w) {
    w.validate();
    const auto [lo_it, hi_it] = std::minmax_element(w.samples.begin(), w.samples.end());
    const double vmin = *lo_it, vmax = *hi_it;
    if (vmax - vmin < 2.0 * kLevelBinMv)
        throw Error(Errc::LevelsUnresolved, "waveform has a single level");

    // Bins are centred on multiples of the bin width.
    const auto base = static_cast<long>(std::round(vmin / kLevelBinMv));
    const auto top = static_cast<long>(std::round(vmax / kLevelBinMv));
    const auto bin_of = [&](double v) {
        return static_cast<std::size_t>(static_cast<long>(std::round(v / kLevelBinMv)) - base);
    };
    std::vector<std::size_t> counts(static_cast<std::size_t>(top - base + 1), 0);
    for (double v : w.samples)
        ++counts[bin_of(v)];

    const double mid = 0.5 * (vmin + vmax);
    const auto centre = [&](std::size_t b) { return (static_cast<double>(base) + static_cast<double>(b)) * kLevelBinMv; };
    std::size_t low_mode = 0, high_mode = counts.size() - 1;
    for (std::size_t b = 0; b < counts.size(); ++b) {
        if (centre(b) < mid) {
            if (counts[b] > counts[low_mode])
                low_mode = b;
        } else if (counts[b] > counts[high_mode] || centre(high_mode) < mid) {
            high_mode = b;
        }
    }

    // Both modes must stand clear of the valley between them.
    const std::size_t peak = std::min(counts[low_mode], counts[high_mode]);
    std::size_t valley = peak;
    for (std::size_t b = low_mode + 1; b < high_mode; ++b)
        valley = std::min(valley, counts[b]);
    const auto total = static_cast<double>(w.samples.size());
    if (high_mode <= low_mode + 1 || static_cast<double>(peak) < 0.02 * total || valley * 2 > peak)
        throw Error(Errc::LevelsUnresolved, "level distribution is not bimodal");

    // Median of the modal bin: settled samples outnumber edge samples passing through it.
    const auto bin_median = [&](std::size_t bin) {
        std::vector<double> members;
        members.reserve(counts[bin]);
        for (double v : w.samples)
            if (bin_of(v) == bin)
                members.push_back(v);
        const auto mid_it = members.begin() + static_cast<std::ptrdiff_t>(members.size() / 2);
        std::nth_element(members.begin(), mid_it, members.end());
        return *mid_it;
    };
    LevelEstimate est;
    est.v_high = bin_median(high_mode);
    est.v_low = bin_median(low_mode);
    est.midpoint = 0.5 * (est.v_high + est.v_low);
    return est;
}

TransitionTimes measure_transition_time(const Waveform& w, double low_frac, double high_frac,
                                        std::optional<LevelEstimate> levels) {
    if (!(low_frac >= 0.0 && low_frac < high_frac && high_frac <= 1.0))
        throw Error(Errc::InvalidArgument, "fractions must satisfy 0 <= low < high <= 1");
    w.validate();
    LevelEstimate lv;
    try {
        lv = levels ? *levels : measure_levels(w);
    } catch (const Error& e) {
        if (e.code() == Errc::LevelsUnresolved)
            throw Error(Errc::InsufficientData, "no transitions: " + e.detail());
        throw;
    }
    const double lo = lv.v_low + low_frac * (lv.v_high - lv.v_low);
    const double hi = lv.v_low + high_frac * (lv.v_high - lv.v_low);

    std::optional<double> rise_start, fall_start;
    double rise_sum = 0.0, fall_sum = 0.0;
    TransitionTimes out;
    const auto& v = w.samples;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const double a = v[i], b = v[i + 1];
        const double t = w.time_at(i);
        const auto at = [&](double level) { return t + w.dt * (level - a) / (b - a); };
        if (b > a) {
            if (a < lo && b >= lo)
                rise_start = at(lo);
            if (a < hi && b >= hi) {
                if (rise_start) {
                    rise_sum += at(hi) - *rise_start;
                    ++out.rise_count;
                }
                rise_start.reset();
                fall_start.reset();
            }
        } else if (b < a) {
            if (a > hi && b <= hi)
                fall_start = at(hi);
            if (a > lo && b <= lo) {
                if (fall_start) {
                    fall_sum += at(lo) - *fall_start;
                    ++out.fall_count;
                }
                fall_start.reset();
                rise_start.reset();
            }
        }
    }
    if (out.rise_count)
        out.rise = rise_sum / static_cast<double>(out.rise_count);
    if (out.fall_count)
        out.fall = fall_sum / static_cast<double>(out.fall_count);
    if (!out.rise && !out.fall)
        throw Error(Errc::InsufficientData, "no complete transition");
    return out;
}

EyeMetrics compute_eye_metrics(const Waveform& w, double period, std::optional<double> threshold) {
    std::optional<LevelEstimate> levels;
    if (!threshold) {
        levels = measure_levels(w);
        threshold = levels->midpoint;
    }
    const EyeRecord eye = fold_eye(w, period, *threshold);
    const JitterStats jit = crossover_jitter(eye);

    EyeMetrics m;
    m.threshold = *threshold;
    m.crossings = eye.crossing_times.size();
    m.jitter_pp = jit.pp;
    m.jitter_rms = jit.rms;
    const EyeOpening open = eye_opening(period, jit.pp);
    m.eye_opening_ui = open.ui;
    m.eye_closed = open.closed;

    double min_high = std::numeric_limits<double>::infinity();
    double max_low = -std::numeric_limits<double>::infinity();
    for (const auto& trace : eye.traces) {
        const double v = trace.front();
        if (v >= *threshold)
            min_high = std::min(min_high, v);
        else
            max_low = std::max(max_low, v);
    }
    m.eye_height = (std::isfinite(min_high) && std::isfinite(max_low)) ? std::max(0.0, min_high - max_low) : 0.0;

    try {
        const auto tt = measure_transition_time(w, 0.2, 0.8, levels);
        m.rise_2080 = tt.rise;
        m.fall_2080 = tt.fall;
    } catch (const Error& e) {
        if (e.code() != Errc::InsufficientData)
            throw;
    }
    return m;
}

void write_eye_histogram(std::ostream& os, const EyeRecord& eye, double voltage_bin) {
    if (!(voltage_bin > 0.0))
        throw Error(Errc::InvalidArgument, "voltage bin must be positive");
    os << "# eye period_ps=" << format_roundtrip(eye.period) << " threshold_mv=" << format_roundtrip(eye.threshold)
       << " traces=" << eye.traces.size() << '\n';
    os << "phase_ps voltage_mv count\n";
    if (eye.traces.empty())
        return;
    const std::size_t grid = eye.traces.front().size();
    for (std::size_t j = 0; j < grid; ++j) {
        std::map<long, std::size_t> bins;
        for (const auto& trace : eye.traces)
            ++bins[static_cast<long>(std::floor(trace[j] / voltage_bin))];
        const std::string phase = format_roundtrip(static_cast<double>(j) * eye.phase_step);
        for (const auto& [bin, count] : bins)
            os << phase << ' ' << format_roundtrip(static_cast<double>(bin) * voltage_bin) << ' ' << count << '\n';
    }
}

void write_metrics(std::ostream& os, const EyeMetrics& m, std::string_view prefix) {
    const auto line = [&](std::string_view key, const std::string& value) {
        os << prefix << key << " = " << value << '\n';
    };
    line("jitter_pp_ps", format_fixed(m.jitter_pp, 3));
    line("jitter_rms_ps", format_fixed(m.jitter_rms, 3));
    line("eye_opening_ui", format_fixed(m.eye_opening_ui, 4));
    line("eye_closed", m.eye_closed ? "true" : "false");
    line("eye_height_mv", format_fixed(m.eye_height, 3));
    line("rise_2080_ps", m.rise_2080 ? format_fixed(*m.rise_2080, 3) : "n/a");
    line("fall_2080_ps", m.fall_2080 ? format_fixed(*m.fall_2080, 3) : "n/a");
    line("threshold_mv", format_fixed(m.threshold, 3));
    line("crossings", std::to_string(m.crossings));
}

} // namespace peclsim
