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

#include <string>
#include <string_view>

namespace peclsim {

/// Shortest decimal form that parses back to the same double.
std::string format_roundtrip(double value);

/// Fixed-point with `digits` decimals; "-0" prints as "0".
std::string format_fixed(double value, int digits);

/// Strict full-string parse. Throws InvalidArgument on garbage.
double parse_double(std::string_view text);

} // namespace peclsim
