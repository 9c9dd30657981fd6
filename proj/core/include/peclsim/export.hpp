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

#include "peclsim/eye_analysis.hpp"
#include "peclsim/harness.hpp"
#include "peclsim/sampler.hpp"

#include <filesystem>
#include <string_view>

namespace peclsim {

enum class ExportFormat { Text };

/// "txt" (alias "text"); anything else raises UnsupportedFormat.
ExportFormat parse_export_format(std::string_view tag);

void export_waveform(const Waveform& w, const std::filesystem::path& path, std::string_view format = "txt");
Waveform import_waveform(const std::filesystem::path& path);

void export_eye_histogram(const EyeRecord& eye, const std::filesystem::path& path, std::string_view format = "txt");
void export_metrics(const EyeMetrics& m, const std::filesystem::path& path, std::string_view format = "txt");
void export_capture(const Capture& c, const std::filesystem::path& path, std::string_view format = "txt");
void export_report(const RunReport& r, const std::filesystem::path& path, std::string_view format = "txt");
void export_report(const ParallelReport& r, const std::filesystem::path& path, std::string_view format = "txt");

} // namespace peclsim
