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

#include "peclsim/error.hpp"

namespace peclsim {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::InvalidSeed: return "InvalidSeed";
    case Errc::InvalidPolynomial: return "InvalidPolynomial";
    case Errc::InvalidPattern: return "InvalidPattern";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::UnsupportedFanIn: return "UnsupportedFanIn";
    case Errc::RangeExceeded: return "RangeExceeded";
    case Errc::QuantizationError: return "QuantizationError";
    case Errc::EdgeCollision: return "EdgeCollision";
    case Errc::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case Errc::InvalidLevels: return "InvalidLevels";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::LevelsUnresolved: return "LevelsUnresolved";
    case Errc::ConfigSyntaxError: return "ConfigSyntaxError";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

namespace {
std::string compose(Errc code, const std::string& message, const std::string& stage) {
    std::string out;
    if (!stage.empty()) {
        out += stage;
        out += ": ";
    }
    out += to_string(code);
    if (!message.empty()) {
        out += ": ";
        out += message;
    }
    return out;
}
} // namespace

Error::Error(Errc code, const std::string& message, std::string stage)
    : std::runtime_error(compose(code, message, stage)), code_(code), detail_(message),
      stage_(std::move(stage)) {}

Error Error::at_stage(std::string stage) const {
    if (!stage_.empty())
        return *this;
    return Error(code_, detail_, std::move(stage));
}

} // namespace peclsim
