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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace peclsim {

using Bit = std::uint8_t;

/// Logical bit stream with its nominal bit rate.
struct BitPattern {
    std::vector<Bit> bits;
    double bit_rate = 0.0; ///< bits per second

    /// Bit period in picoseconds.
    double period_ps() const noexcept { return 1e12 / bit_rate; }
    std::size_t size() const noexcept { return bits.size(); }

    /// Throws InvalidPattern for empty or non-binary bits, InvalidArgument for a bad rate.
    void validate() const;

    bool operator==(const BitPattern&) const = default;
};

/// Fibonacci LFSR description.
///
/// Stages are numbered 1..degree. Bit k-1 of `seed` holds stage k. Each step
/// emits stage `degree` (the highest-degree stage), shifts every stage up by
/// one and loads stage 1 with the XOR of all tapped stages. The polynomial
/// x^7 + x^6 + 1 is written as degree 7, taps {7, 6}.
struct LfsrSpec {
    unsigned degree = 7;
    std::vector<unsigned> taps{7, 6};
    std::uint64_t seed = 0x7f;

    void validate() const;

    /// PRBS-7 (x^7 + x^6 + 1), all-ones seed.
    static LfsrSpec prbs7() { return {}; }
};

/// Bit-serial LFSR engine over an LfsrSpec.
class Lfsr {
public:
    explicit Lfsr(const LfsrSpec& spec);

    Bit next() noexcept;
    std::uint64_t state() const noexcept { return state_; }

private:
    unsigned degree_;
    std::uint64_t tap_mask_;
    std::uint64_t state_;
};

BitPattern prbs_generate(const LfsrSpec& spec, std::size_t n_bits, double rate);

enum class FixedKind { Alternating, AllOnes, AllZeros, Custom };

/// Alternating starts with 1. Custom bits repeat cyclically up to n_bits.
BitPattern fixed_pattern(FixedKind kind, std::size_t n_bits, double rate,
                         std::span<const Bit> custom = {});

/// Channel set for one optical test bed burst.
///
/// Data and clock channels run at the data rate. The frame and header
/// channels run at data_rate / frame_divisor and hold their value for the
/// whole burst, so both span exactly word_length data bit periods.
struct VortexFrame {
    std::array<BitPattern, 4> data_channels;
    BitPattern clock_channel;
    BitPattern frame_channel;
    std::array<BitPattern, 4> header_channels;
    std::size_t frame_divisor = 8;

    std::size_t word_length() const noexcept { return data_channels[0].size(); }
    double data_period_ps() const noexcept { return data_channels[0].period_ps(); }
    /// Duration of the frame assertion in ps.
    double frame_duration_ps() const noexcept {
        return static_cast<double>(frame_channel.size()) * frame_channel.period_ps();
    }
};

inline constexpr std::size_t kDefaultFrameDivisor = 8;

/// Words must share one length, divisible by frame_divisor.
VortexFrame build_vortex_frame(const std::array<std::vector<Bit>, 4>& data_words,
                               const std::array<Bit, 4>& header_bits, double data_rate,
                               std::size_t frame_divisor = kDefaultFrameDivisor);

} // namespace peclsim
