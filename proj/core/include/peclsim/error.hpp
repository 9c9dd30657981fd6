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

#include <stdexcept>
#include <string>
#include <string_view>

namespace peclsim {

/// Failure categories raised by every stage of the simulator.
enum class Errc {
    InvalidSeed,
    InvalidPolynomial,
    InvalidPattern,
    InvalidArgument,
    ShapeMismatch,
    UnsupportedFanIn,
    RangeExceeded,
    QuantizationError,
    EdgeCollision,
    ResolutionTooCoarse,
    InvalidLevels,
    OutOfRange,
    InsufficientData,
    LevelsUnresolved,
    ConfigSyntaxError,
    ConfigInvalid,
    UnsupportedFormat,
    IoError,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message, std::string stage = {});

    Errc code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }
    /// Pipeline stage that raised the error; empty outside the harness.
    const std::string& stage() const noexcept { return stage_; }

    /// Same error, attributed to `stage`. An already-attributed error keeps its stage.
    Error at_stage(std::string stage) const;

private:
    Errc code_;
    std::string detail_;
    std::string stage_;
};

} // namespace peclsim
