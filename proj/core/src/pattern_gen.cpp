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

#include "peclsim/pattern_gen.hpp"

#include "peclsim/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace peclsim {

namespace {
void check_rate(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw Error(Errc::InvalidArgument, "bit rate must be positive and finite");
}
} // namespace

void BitPattern::validate() const {
    if (bits.empty())
        throw Error(Errc::InvalidPattern, "pattern has no bits");
    if (std::any_of(bits.begin(), bits.end(), [](Bit b) { return b > 1; }))
        throw Error(Errc::InvalidPattern, "pattern bits must be 0 or 1");
    check_rate(bit_rate);
}

void LfsrSpec::validate() const {
    if (taps.empty())
        throw Error(Errc::InvalidPolynomial, "empty tap set");
    if (degree < 2 || degree > 63)
        throw Error(Errc::InvalidPolynomial, "degree must be in [2, 63]");
    if (std::find(taps.begin(), taps.end(), degree) == taps.end())
        throw Error(Errc::InvalidPolynomial, "tap set must include the degree term");
    for (unsigned t : taps)
        if (t < 1 || t > degree)
            throw Error(Errc::InvalidPolynomial, "tap " + std::to_string(t) + " outside [1, degree]");
    if (seed == 0)
        throw Error(Errc::InvalidSeed, "seed must be nonzero");
    if (seed >> degree)
        throw Error(Errc::InvalidSeed, "seed wider than the register");
}

Lfsr::Lfsr(const LfsrSpec& spec) : degree_(spec.degree), tap_mask_(0), state_(spec.seed) {
    spec.validate();
    for (unsigned t : spec.taps)
        tap_mask_ |= std::uint64_t{1} << (t - 1);
}

Bit Lfsr::next() noexcept {
    const auto out = static_cast<Bit>((state_ >> (degree_ - 1)) & 1U);
    const auto feedback = static_cast<std::uint64_t>(std::popcount(state_ & tap_mask_) & 1);
    const std::uint64_t mask = (std::uint64_t{1} << degree_) - 1;
    state_ = ((state_ << 1) | feedback) & mask;
    return out;
}

BitPattern prbs_generate(const LfsrSpec& spec, std::size_t n_bits, double rate) {
    Lfsr lfsr(spec);
    if (n_bits == 0)
        throw Error(Errc::InvalidPattern, "n_bits must be at least 1");
    check_rate(rate);
    BitPattern out{std::vector<Bit>(n_bits), rate};
    for (auto& b : out.bits)
        b = lfsr.next();
    return out;
}

BitPattern fixed_pattern(FixedKind kind, std::size_t n_bits, double rate, std::span<const Bit> custom) {
    if (n_bits == 0)
        throw Error(Errc::InvalidPattern, "n_bits must be at least 1");
    check_rate(rate);
    BitPattern out{std::vector<Bit>(n_bits, 0), rate};
    switch (kind) {
    case FixedKind::Alternating:
        for (std::size_t i = 0; i < n_bits; ++i)
            out.bits[i] = static_cast<Bit>((i % 2) == 0);
        break;
    case FixedKind::AllOnes:
        std::fill(out.bits.begin(), out.bits.end(), Bit{1});
        break;
    case FixedKind::AllZeros:
        break;
    case FixedKind::Custom:
        if (custom.empty())
            throw Error(Errc::InvalidPattern, "custom pattern has no bits");
        for (std::size_t i = 0; i < n_bits; ++i)
            out.bits[i] = custom[i % custom.size()];
        break;
    }
    out.validate();
    return out;
}

VortexFrame build_vortex_frame(const std::array<std::vector<Bit>, 4>& data_words,
                               const std::array<Bit, 4>& header_bits, double data_rate,
                               std::size_t frame_divisor) {
    check_rate(data_rate);
    if (frame_divisor < 1)
        throw Error(Errc::InvalidArgument, "frame divisor must be at least 1");
    const std::size_t len = data_words[0].size();
    for (const auto& w : data_words)
        if (w.size() != len)
            throw Error(Errc::ShapeMismatch, "data words differ in length");
    if (len == 0)
        throw Error(Errc::InvalidPattern, "data words are empty");
    if (len % frame_divisor != 0)
        throw Error(Errc::ShapeMismatch, "word length " + std::to_string(len) +
                                             " is not a multiple of the frame divisor " +
                                             std::to_string(frame_divisor));

    VortexFrame frame;
    frame.frame_divisor = frame_divisor;
    for (std::size_t i = 0; i < 4; ++i) {
        frame.data_channels[i] = BitPattern{data_words[i], data_rate};
        frame.data_channels[i].validate();
    }
    // One clock transition per data bit boundary.
    frame.clock_channel = fixed_pattern(FixedKind::Alternating, len, data_rate);

    const double slow_rate = data_rate / static_cast<double>(frame_divisor);
    const std::size_t slow_len = len / frame_divisor;
    frame.frame_channel = BitPattern{std::vector<Bit>(slow_len, 1), slow_rate};
    for (std::size_t i = 0; i < 4; ++i) {
        if (header_bits[i] > 1)
            throw Error(Errc::InvalidPattern, "header bits must be 0 or 1");
        frame.header_channels[i] = BitPattern{std::vector<Bit>(slow_len, header_bits[i]), slow_rate};
    }
    return frame;
}

} // namespace peclsim
