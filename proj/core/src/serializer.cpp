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

#include "peclsim/serializer.hpp"

#include "peclsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace peclsim {

void EdgeSequence::validate() const {
    if (!(t_end >= t_start))
        throw Error(Errc::InvalidArgument, "edge sequence span is inverted");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto& e = edges[i];
        if (!std::isfinite(e.time_ps))
            throw Error(Errc::InvalidArgument, "non-finite edge time");
        if (e.time_ps < t_start || e.time_ps > t_end)
            throw Error(Errc::InvalidArgument, "edge " + std::to_string(i) + " outside the sequence span");
        if (i > 0) {
            if (!(e.time_ps > edges[i - 1].time_ps))
                throw Error(Errc::EdgeCollision, "edge " + std::to_string(i) + " at " +
                                                     std::to_string(e.time_ps) +
                                                     " ps does not follow its predecessor");
            if (e.dir == edges[i - 1].dir)
                throw Error(Errc::EdgeCollision, "edge " + std::to_string(i) + " repeats direction");
        }
    }
}

double quantize_delay(double requested_ps, const EdgeProgram& program) {
    if (!(program.resolution > 0.0) || !(program.range >= program.resolution))
        throw Error(Errc::InvalidArgument, "edge program needs resolution > 0 and range >= resolution");
    if (!(requested_ps >= 0.0))
        throw Error(Errc::RangeExceeded, "negative delay requested");
    if (requested_ps > program.range)
        throw Error(Errc::RangeExceeded, std::to_string(requested_ps) + " ps exceeds the " +
                                             std::to_string(program.range) + " ps range");
    // Round half toward zero.
    const double steps = std::ceil(requested_ps / program.resolution - 0.5);
    const double q = std::max(0.0, steps) * program.resolution;
    return std::min(q, std::floor(program.range / program.resolution) * program.resolution);
}

EdgeProgram EdgeProgram::make(double leading_request, double trailing_request, double resolution,
                              double range) {
    EdgeProgram p{0.0, 0.0, resolution, range};
    p.leading_delay = quantize_delay(leading_request, p);
    p.trailing_delay = quantize_delay(trailing_request, p);
    return p;
}

namespace {
bool same_rate(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }
} // namespace

BitPattern mux_stage(std::span<const BitPattern> channels) {
    const std::size_t count = channels.size();
    if (count != 2 && count != 8)
        throw Error(Errc::UnsupportedFanIn, "fan-in " + std::to_string(count) + " (supported: 2, 8)");
    const auto& first = channels.front();
    first.validate();
    for (const auto& ch : channels) {
        if (ch.size() != first.size())
            throw Error(Errc::ShapeMismatch, "mux channels differ in length");
        if (!same_rate(ch.bit_rate, first.bit_rate))
            throw Error(Errc::ShapeMismatch, "mux channels differ in rate");
    }
    BitPattern out{std::vector<Bit>(first.size() * count), first.bit_rate * static_cast<double>(count)};
    for (std::size_t i = 0; i < out.bits.size(); ++i)
        out.bits[i] = channels[i % count].bits[i / count];
    return out;
}

std::vector<BitPattern> demux_stage(const BitPattern& stream, std::size_t count) {
    if (count == 0)
        throw Error(Errc::InvalidArgument, "demux count must be at least 1");
    if (stream.size() % count != 0)
        throw Error(Errc::ShapeMismatch, std::to_string(stream.size()) + " bits do not split into " +
                                             std::to_string(count) + " channels");
    const std::size_t len = stream.size() / count;
    std::vector<BitPattern> out(count, BitPattern{std::vector<Bit>(len), stream.bit_rate / static_cast<double>(count)});
    for (std::size_t i = 0; i < stream.size(); ++i)
        out[i % count].bits[i / count] = stream.bits[i];
    return out;
}

BitPattern serialize_two_stage(const DlcLanes& lanes) {
    const std::array<BitPattern, 2> groups{
        mux_stage(std::span<const BitPattern>(lanes.data(), 8)),
        mux_stage(std::span<const BitPattern>(lanes.data() + 8, 8)),
    };
    return mux_stage(groups);
}

DlcLanes split_two_stage(const BitPattern& stream) {
    if (stream.size() % 16 != 0)
        throw Error(Errc::ShapeMismatch, "two-stage chain needs a multiple of 16 bits");
    const auto groups = demux_stage(stream, 2);
    DlcLanes lanes;
    for (std::size_t g = 0; g < 2; ++g) {
        auto lane_set = demux_stage(groups[g], 8);
        std::move(lane_set.begin(), lane_set.end(), lanes.begin() + static_cast<std::ptrdiff_t>(8 * g));
    }
    return lanes;
}

namespace {
bool on_grid(double delay, double resolution) {
    const double steps = delay / resolution;
    return std::abs(steps - std::round(steps)) <= 1e-9 * std::max(1.0, std::abs(steps));
}
} // namespace

EdgeSequence place_edges(const BitPattern& pattern, const EdgeProgram& program) {
    pattern.validate();
    for (double d : {program.leading_delay, program.trailing_delay}) {
        if (d < 0.0 || d > program.range)
            throw Error(Errc::RangeExceeded, "edge delay outside the programmable range");
        if (!on_grid(d, program.resolution))
            throw Error(Errc::QuantizationError, std::to_string(d) + " ps is not a multiple of the " +
                                                     std::to_string(program.resolution) + " ps resolution");
    }
    const double period = pattern.period_ps();
    EdgeSequence seq;
    seq.t_start = 0.0;
    seq.t_end = static_cast<double>(pattern.size()) * period +
                std::max(program.leading_delay, program.trailing_delay);
    Bit prev = 0;
    for (std::size_t k = 0; k < pattern.size(); ++k) {
        const Bit b = pattern.bits[k];
        if (b == prev)
            continue;
        const double nominal = static_cast<double>(k) * period;
        if (b)
            seq.edges.push_back({nominal + program.leading_delay, EdgeDir::Rising});
        else
            seq.edges.push_back({nominal + program.trailing_delay, EdgeDir::Falling});
        prev = b;
    }
    seq.validate();
    return seq;
}

} // namespace peclsim
