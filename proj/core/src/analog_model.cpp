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

#include "peclsim/error.hpp"
#include "peclsim/random.hpp"
#include "peclsim/text_format.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

namespace peclsim {

namespace {
// Standard normal quantile at 0.8.
constexpr double kZ80 = 0.8416212335729143;
// Beyond this many sigmas an erf edge is settled to within one ulp.
constexpr double kSettleSigmas = 8.5;

double phi(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
} // namespace

double Waveform::value_at(double t) const {
    if (samples.empty())
        throw Error(Errc::InsufficientData, "empty waveform");
    const double x = (t - t0) / dt;
    const double last = static_cast<double>(samples.size() - 1);
    if (x < -1e-9 || x > last + 1e-9)
        throw Error(Errc::OutOfRange, "t = " + std::to_string(t) + " ps outside the waveform");
    const double xc = std::clamp(x, 0.0, last);
    const auto i = static_cast<std::size_t>(std::floor(xc));
    if (i + 1 >= samples.size())
        return samples.back();
    const double frac = xc - static_cast<double>(i);
    if (frac == 0.0)
        return samples[i];
    return samples[i] + frac * (samples[i + 1] - samples[i]);
}

void Waveform::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw Error(Errc::InvalidArgument, "waveform dt must be positive");
    if (samples.empty())
        throw Error(Errc::InvalidArgument, "waveform has no samples");
    if (!std::isfinite(t0) || std::any_of(samples.begin(), samples.end(), [](double v) { return !std::isfinite(v); }))
        throw Error(Errc::InvalidArgument, "waveform contains non-finite values");
}

void JitterConfig::validate() const {
    if (!(rj_rms >= 0.0) || !(dj_pp >= 0.0) || !std::isfinite(rj_rms) || !std::isfinite(dj_pp))
        throw Error(Errc::InvalidArgument, "jitter magnitudes must be finite and non-negative");
}

void LevelConfig::validate() const {
    if (!(v_high > v_low))
        throw Error(Errc::InvalidLevels, "v_high must exceed v_low");
    if (!(t_rise_2080 > 0.0) || !(t_fall_2080 > 0.0))
        throw Error(Errc::InvalidArgument, "transition times must be positive");
    if (!(high_step > 0.0) || !(swing_step > 0.0))
        throw Error(Errc::InvalidArgument, "level steps must be positive");
}

void ChannelModel::validate() const {
    if (!(delay >= 0.0) || !(attenuation_db >= 0.0))
        throw Error(Errc::InvalidArgument, "channel delay and attenuation must be non-negative");
    if (bandwidth_ghz && !(*bandwidth_ghz > 0.0))
        throw Error(Errc::InvalidArgument, "channel bandwidth must be positive");
}

double edge_sigma_for_2080(double t_2080) { return t_2080 / (2.0 * kZ80); }

EdgeSequence inject_jitter(const EdgeSequence& edges, const JitterConfig& cfg) {
    cfg.validate();
    edges.validate();
    EdgeSequence out = edges;
    Rng rng(cfg.seed);
    const double half = 0.5 * cfg.dj_pp;
    for (auto& e : out.edges) {
        const double rj = cfg.rj_rms * rng.normal();
        const double dj = rng.uniform(-half, half);
        e.time_ps += rj + dj;
    }
    if (!out.edges.empty()) {
        out.t_start = std::min(out.t_start, out.edges.front().time_ps);
        out.t_end = std::max(out.t_end, out.edges.back().time_ps);
    }
    out.validate();
    return out;
}

Waveform render_waveform(const EdgeSequence& edges, const LevelConfig& levels, double dt) {
    levels.validate();
    edges.validate();
    if (!(dt > 0.0))
        throw Error(Errc::InvalidArgument, "dt must be positive");
    const double finest = std::min(levels.t_rise_2080, levels.t_fall_2080);
    if (dt > finest / 10.0 * (1.0 + 1e-12))
        throw Error(Errc::ResolutionTooCoarse, "dt " + std::to_string(dt) + " ps exceeds " +
                                                   std::to_string(finest / 10.0) + " ps");

    const auto n = static_cast<std::size_t>(std::floor((edges.t_end - edges.t_start) / dt + 1e-9)) + 1;
    Waveform w{std::vector<double>(n), dt, edges.t_start};

    const auto& es = edges.edges;
    const double sigma_r = edge_sigma_for_2080(levels.t_rise_2080);
    const double sigma_f = edge_sigma_for_2080(levels.t_fall_2080);
    const double window = kSettleSigmas * std::max(sigma_r, sigma_f);
    const double initial = (!es.empty() && es.front().dir == EdgeDir::Falling) ? 1.0 : 0.0;
    const double swing = levels.swing();

    std::size_t first = 0; // first edge not yet settled at time t
    for (std::size_t i = 0; i < n; ++i) {
        const double t = w.time_at(i);
        while (first < es.size() && es[first].time_ps <= t - window)
            ++first;
        double level = first == 0 ? initial : (es[first - 1].dir == EdgeDir::Rising ? 1.0 : 0.0);
        for (std::size_t k = first; k < es.size() && es[k].time_ps < t + window; ++k) {
            if (es[k].dir == EdgeDir::Rising)
                level += phi((t - es[k].time_ps) / sigma_r);
            else
                level -= phi((t - es[k].time_ps) / sigma_f);
        }
        w.samples[i] = levels.v_low + swing * level;
    }
    return w;
}

LevelConfig adjust_levels(const LevelConfig& levels, int high_steps, int swing_steps) {
    LevelConfig out = levels;
    out.v_high -= high_steps * levels.high_step;
    if (swing_steps != 0) {
        const double mid = out.midpoint();
        const double half = 0.5 * (out.swing() - swing_steps * levels.swing_step);
        out.v_high = mid + half;
        out.v_low = mid - half;
    }
    if (!(out.v_high > out.v_low))
        throw Error(Errc::InvalidLevels, "adjusted v_high " + std::to_string(out.v_high) +
                                             " mV is not above v_low " + std::to_string(out.v_low) + " mV");
    return out;
}

Waveform channel_transfer(const Waveform& w, const ChannelModel& ch) {
    ch.validate();
    w.validate();
    Waveform out = w;
    if (ch.attenuation_db > 0.0) {
        const auto [lo, hi] = std::minmax_element(out.samples.begin(), out.samples.end());
        const double mid = 0.5 * (*lo + *hi);
        const double gain = std::pow(10.0, -ch.attenuation_db / 20.0);
        for (auto& v : out.samples)
            v = mid + (v - mid) * gain;
    }
    if (ch.bandwidth_ghz) {
        // Single-pole RC, impulse-invariant discretization.
        const double alpha = 1.0 - std::exp(-2.0 * std::numbers::pi * *ch.bandwidth_ghz * 1e-3 * out.dt);
        double y = out.samples.front();
        for (auto& v : out.samples) {
            y += alpha * (v - y);
            v = y;
        }
    }
    out.t0 += ch.delay;
    return out;
}

void write_waveform(std::ostream& os, const Waveform& w) {
    w.validate();
    os << "# waveform dt_ps=" << format_roundtrip(w.dt) << " t0_ps=" << format_roundtrip(w.t0)
       << " samples=" << w.samples.size() << '\n';
    os << "time_ps voltage_mv\n";
    for (std::size_t i = 0; i < w.samples.size(); ++i)
        os << format_roundtrip(w.time_at(i)) << ' ' << format_roundtrip(w.samples[i]) << '\n';
}

Waveform read_waveform(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# waveform", 0) != 0)
        throw Error(Errc::InvalidArgument, "missing waveform header");
    Waveform w;
    std::size_t expected = 0;
    bool have_dt = false, have_t0 = false, have_n = false;
    std::istringstream hs(line.substr(10));
    std::string field;
    while (hs >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos)
            continue;
        const auto key = field.substr(0, eq);
        const auto value = field.substr(eq + 1);
        if (key == "dt_ps") {
            w.dt = parse_double(value);
            have_dt = true;
        } else if (key == "t0_ps") {
            w.t0 = parse_double(value);
            have_t0 = true;
        } else if (key == "samples") {
            expected = static_cast<std::size_t>(parse_double(value));
            have_n = true;
        }
    }
    if (!have_dt || !have_t0 || !have_n)
        throw Error(Errc::InvalidArgument, "waveform header lacks dt_ps, t0_ps or samples");
    if (!std::getline(is, line))
        throw Error(Errc::InvalidArgument, "missing column header");
    w.samples.reserve(expected);
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        const auto sp = line.find(' ');
        if (sp == std::string::npos)
            throw Error(Errc::InvalidArgument, "malformed waveform row");
        w.samples.push_back(parse_double(std::string_view(line).substr(sp + 1)));
    }
    if (w.samples.size() != expected)
        throw Error(Errc::InvalidArgument, "waveform row count does not match header");
    w.validate();
    return w;
}

} // namespace peclsim
