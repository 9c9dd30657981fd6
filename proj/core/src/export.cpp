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

#include "peclsim/export.hpp"

#include "peclsim/error.hpp"

#include <fstream>

namespace peclsim {

ExportFormat parse_export_format(std::string_view tag) {
    if (tag == "txt" || tag == "text")
        return ExportFormat::Text;
    throw Error(Errc::UnsupportedFormat, "unknown export format '" + std::string(tag) + "'");
}

namespace {

template <class Writer>
void write_file(const std::filesystem::path& path, std::string_view format, Writer&& writer) {
    (void)parse_export_format(format);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
    writer(os);
    os.flush();
    if (!os)
        throw Error(Errc::IoError, "write to " + path.string() + " failed");
}

} // namespace

void export_waveform(const Waveform& w, const std::filesystem::path& path, std::string_view format) {
    write_file(path, format, [&](std::ostream& os) { write_waveform(os, w); });
}

Waveform import_waveform(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw Error(Errc::IoError, "cannot open " + path.string());
    return read_waveform(is);
}

void export_eye_histogram(const EyeRecord& eye, const std::filesystem::path& path, std::string_view format) {
    write_file(path, format, [&](std::ostream& os) { write_eye_histogram(os, eye); });
}

void export_metrics(const EyeMetrics& m, const std::filesystem::path& path, std::string_view format) {
    write_file(path, format, [&](std::ostream& os) { write_metrics(os, m); });
}

void export_capture(const Capture& c, const std::filesystem::path& path, std::string_view format) {
    write_file(path, format, [&](std::ostream& os) { write_capture(os, c); });
}

void export_report(const RunReport& r, const std::filesystem::path& path, std::string_view format) {
    write_file(path, format, [&](std::ostream& os) { write_report(os, r); });
}

void export_report(const ParallelReport& r, const std::filesystem::path& path, std::string_view format) {
    write_file(path, format, [&](std::ostream& os) { write_report(os, r); });
}

} // namespace peclsim
