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
#include "peclsim/harness.hpp"
#include "peclsim/scenario.hpp"
#include "peclsim/text_format.hpp"
#include "peclsim/version.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace peclsim;

namespace {

// Exit codes: every verdict passed / some verdict failed / could not run.
constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kError = 2;

struct Overrides {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> sites;
};

ScenarioConfig resolve(const Overrides& o) {
    ScenarioConfig cfg = load_scenario(o.scenario);
    if (o.seed)
        cfg.seed = *o.seed;
    if (o.out)
        cfg.output.directory = *o.out;
    if (o.sites)
        cfg.sites = *o.sites;
    cfg.validate();
    return cfg;
}

void print_summary(const RunReport& r) {
    for (const auto& ch : r.channels) {
        std::cout << "  " << ch.name << ": ";
        if (ch.eye)
            std::cout << "opening " << format_fixed(ch.eye->eye_opening_ui, 4) << " UI, jitter p-p "
                      << format_fixed(ch.eye->jitter_pp, 2) << " ps";
        else
            std::cout << ch.note;
        std::cout << '\n';
    }
    if (r.capture)
        std::cout << "  bit errors: " << r.capture->error_count << '\n';
    for (const auto& v : r.verdicts)
        std::cout << "  " << (v.passed ? "PASS " : "FAIL ") << v.name << " (" << v.detail << ")\n";
}

int cmd_run(const Overrides& o) {
    const ScenarioConfig cfg = resolve(o);
    const fs::path dir = cfg.output.directory;
    fs::create_directories(dir);

    if (cfg.sites > 1) {
        const auto p = run_parallel(cfg, cfg.sites);
        export_report(p, dir / "report.txt");
        for (const auto& s : p.sites)
            std::cout << "site " << s.index << ": " << (s.passed() ? "pass" : "fail")
                      << (s.error.empty() ? "" : " (" + s.error + ")") << '\n';
        std::cout << "throughput factor " << format_fixed(p.throughput_factor, 1) << "\n"
                  << "result " << (p.passed() ? "pass" : "fail") << '\n';
        return p.passed() ? kPass : kFail;
    }

    RunArtifacts art;
    const bool want = cfg.output.waveform || cfg.output.eye_histogram || cfg.output.capture;
    const RunReport r = run_scenario(cfg, want ? &art : nullptr);
    export_report(r, dir / "report.txt");
    if (cfg.output.waveform)
        export_waveform(art.waveform, dir / "waveform.txt");
    if (cfg.output.eye_histogram)
        export_eye_histogram(art.eye, dir / "eye.txt");
    if (cfg.output.capture && art.capture)
        export_capture(*art.capture, dir / "capture.txt");
    std::cout << to_string(cfg.kind) << " run, seed " << cfg.seed << '\n';
    print_summary(r);
    std::cout << "result " << (r.passed() ? "pass" : "fail") << '\n';
    return r.passed() ? kPass : kFail;
}

int cmd_validate(const Overrides& o) {
    std::cout << dump_scenario(resolve(o));
    return kPass;
}

int cmd_export(const Overrides& o, const std::string& what, const std::string& format,
               const std::optional<std::string>& path) {
    parse_export_format(format);
    ScenarioConfig cfg = resolve(o);
    cfg.sites = 1;
    const fs::path target = path ? fs::path(*path) : fs::path(cfg.output.directory) / (what + ".txt");
    if (target.has_parent_path())
        fs::create_directories(target.parent_path());

    RunArtifacts art;
    const RunReport r = run_scenario(cfg, &art);
    if (what == "waveform")
        export_waveform(art.waveform, target, format);
    else if (what == "eye")
        export_eye_histogram(art.eye, target, format);
    else if (what == "metrics")
        export_metrics(r.primary_eye(), target, format);
    else if (what == "report")
        export_report(r, target, format);
    else if (what == "capture") {
        if (!art.capture)
            throw peclsim::Error(Errc::InvalidArgument, "capture exists only for loopback scenarios", "export");
        export_capture(*art.capture, target, format);
    }
    std::cout << target.string() << '\n';
    return kPass;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Desk-scale PECL test bed and wafer loopback simulator"};
    app.set_version_flag("--version", std::string(PECLSIM_VERSION));
    app.require_subcommand(1);

    const auto common = [](CLI::App* sub, Overrides& o) {
        sub->add_option("scenario", o.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "Override the scenario seed");
        sub->add_option("--out", o.out, "Output directory");
    };

    Overrides run_o, val_o, exp_o;
    auto* run = app.add_subcommand("run", "Run a scenario and write report.txt");
    common(run, run_o);
    run->add_option("--sites", run_o.sites, "Parallel loopback sites")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "Check a scenario and print it with defaults resolved");
    validate->add_option("scenario", val_o.scenario, "Scenario file")->required()->check(CLI::ExistingFile);

    std::string what = "report", format = "txt";
    std::optional<std::string> file;
    auto* exp = app.add_subcommand("export", "Run a scenario and export one artifact");
    exp->add_option("scenario", exp_o.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
    exp->add_option("--seed", exp_o.seed, "Override the scenario seed");
    exp->add_option("--what", what, "Artifact")
        ->check(CLI::IsMember({"waveform", "eye", "metrics", "capture", "report"}));
    exp->add_option("--format", format, "Export format (txt)");
    exp->add_option("--out", file, "Destination file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kPass : kError;
    }

    try {
        if (*run)
            return cmd_run(run_o);
        if (*validate)
            return cmd_validate(val_o);
        return cmd_export(exp_o, what, format, file);
    } catch (const std::exception& e) {
        std::cerr << "peclsim: " << e.what() << '\n';
        return kError;
    }
}
