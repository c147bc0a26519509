// Copyright 2026 The evhdr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli.hpp"
#include "evhdr/log.hpp"

namespace {

using evhdr::cli::RunConfig;

struct Flags {
  std::optional<std::string> config;
  std::map<std::string, std::string> overrides;
  std::vector<std::string> settings;
  bool verbose = false;
};

/// Registers `--name` as an override for config key `key`.
void add_override(CLI::App* app, Flags& flags, const std::string& name, const std::string& key,
                  const std::string& help) {
  app->add_option_function<std::string>(
      name, [&flags, key](const std::string& v) { flags.overrides[key] = v; }, help);
}

CLI::App* add_command(CLI::App& app, Flags& flags, const std::string& name,
                      const std::string& help) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--config", flags.config, "key = value settings file");
  add_override(sub, flags, "--output", "output", "output directory");
  add_override(sub, flags, "--threads", "threads", "worker threads");
  add_override(sub, flags, "--seed", "seed", "64-bit random seed");
  sub->add_option("--set", flags.settings, "extra setting as key=value (repeatable)");
  sub->add_flag("-v,--verbose", flags.verbose, "log progress to stderr");
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event camera and frame fusion for HDR video"};
  app.require_subcommand(1);
  Flags flags;

  CLI::App* rec = add_command(app, flags, "reconstruct", "fuse events and frames");
  add_override(rec, flags, "--events", "events", "event CSV");
  add_override(rec, flags, "--frames", "frames", "frame manifest CSV");
  add_override(rec, flags, "--crf", "crf", "CRF table CSV");
  rec->add_option_function<std::string>(
         "--mode", [&flags](const std::string& v) { flags.overrides["mode"] = v; },
         "filter mode")
      ->check(CLI::IsMember({"akf", "constant-gain"}));
  add_override(rec, flags, "--k", "k", "gain for constant-gain mode (1/s)");
  add_override(rec, flags, "--output-rate", "output_rate", "output frame rate (Hz)");

  CLI::App* sim = add_command(app, flags, "simulate", "generate a synthetic dataset");
  add_override(sim, flags, "--video", "video", "ground-truth float-frame manifest");
  add_override(sim, flags, "--scene", "scene", "built-in scene name");

  CLI::App* eval = add_command(app, flags, "evaluate", "score a reconstruction");
  add_override(eval, flags, "--reconstruction", "reconstruction", "reconstruction manifest");
  add_override(eval, flags, "--reference", "reference", "reference manifest");

  CLI::App* fit = add_command(app, flags, "fit-crf", "fit a CRF to an exposure stack");
  add_override(fit, flags, "--stack", "stack", "exposure stack manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : evhdr::cli::kValidation;
  }
  if (flags.verbose) evhdr::set_log_level(evhdr::LogLevel::info);

  return evhdr::cli::guarded([&]() -> int {
    for (const std::string& s : flags.settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw evhdr::ValidationError("--set expects key=value: " + s);
      flags.overrides[s.substr(0, eq)] = s.substr(eq + 1);
    }
    std::optional<std::filesystem::path> config_file;
    if (flags.config) config_file = *flags.config;
    const RunConfig config = evhdr::cli::resolve_config(config_file, flags.overrides);
    if (rec->parsed()) return evhdr::cli::cmd_reconstruct(config);
    if (sim->parsed()) return evhdr::cli::cmd_simulate(config);
    if (eval->parsed()) return evhdr::cli::cmd_evaluate(config);
    return evhdr::cli::cmd_fit_crf(config);
  });
}
