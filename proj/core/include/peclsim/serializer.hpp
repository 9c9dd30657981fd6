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

#include "peclsim/pattern_gen.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace peclsim {

enum class EdgeDir : std::uint8_t { Rising, Falling };

struct Edge {
    double time_ps = 0.0;
    EdgeDir dir = EdgeDir::Rising;

    bool operator==(const Edge&) const = default;
};

/// Timed transitions of one logic signal over [t_start, t_end].
struct EdgeSequence {
    std::vector<Edge> edges;
    double t_start = 0.0;
    double t_end = 0.0;

    /// Strictly increasing times, alternating directions, all inside the span.
    /// Throws EdgeCollision for ordering faults, InvalidArgument otherwise.
    void validate() const;

    bool operator==(const EdgeSequence&) const = default;
};

/// Programmable leading/trailing edge delays. Delays are stored quantized.
struct EdgeProgram {
    double leading_delay = 0.0;  ///< ps, applied to rising edges
    double trailing_delay = 0.0; ///< ps, applied to falling edges
    double resolution = 10.0;    ///< ps
    double range = 10'000.0;     ///< ps

    /// Quantizes both requested delays with this program's resolution and range.
    static EdgeProgram make(double leading_request, double trailing_request,
                            double resolution = 10.0, double range = 10'000.0);
};

/// Nearest multiple of program.resolution; exact ties round toward zero.
double quantize_delay(double requested_ps, const EdgeProgram& program);

/// Round-robin interleave, channel 0 first. Fan-in must be 2 or 8.
BitPattern mux_stage(std::span<const BitPattern> channels);

/// Inverse of mux_stage for any count >= 1.
std::vector<BitPattern> demux_stage(const BitPattern& stream, std::size_t count);

/// Lanes feeding the two-stage chain: lanes[0..7] form mux group A, lanes[8..15] group B.
using DlcLanes = std::array<BitPattern, 16>;

/// 8:1 on each group, then 2:1 on the two group outputs.
BitPattern serialize_two_stage(const DlcLanes& lanes);

/// Lanes that serialize_two_stage maps back onto `stream`. Length must divide by 16.
DlcLanes split_two_stage(const BitPattern& stream);

/// One edge per value change, assuming the line idles low before bit 0.
/// Bit k's nominal boundary is k * T; rising edges get leading_delay and
/// falling edges trailing_delay.
EdgeSequence place_edges(const BitPattern& pattern, const EdgeProgram& program);

} // namespace peclsim
