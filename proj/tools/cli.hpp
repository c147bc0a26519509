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
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "evhdr/augment.hpp"
#include "evhdr/event.hpp"
#include "evhdr/filter.hpp"
#include "evhdr/frame_model.hpp"
#include "evhdr/metrics.hpp"
#include "evhdr/reconstruct.hpp"
#include "evhdr/synth.hpp"

namespace evhdr::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2 };

/// Everything a subcommand needs. Populated from defaults, then a config
/// file, then command-line overrides.
struct RunConfig {
  // paths
  fs::path events;
  fs::path frames;
  fs::path crf;
  fs::path output;
  fs::path reference;       // evaluate
  fs::path reconstruction;  // evaluate
  fs::path video;           // simulate: float-frame manifest
  fs::path stack;           // fit-crf: exposure manifest
  fs::path sim_crf;         // simulate: response table, identity when empty

  int threads = 1;
  std::uint64_t seed = 1;

  EventNoiseParams event_noise;
  FrameNoiseParams frame_noise;
  std::optional<double> r_max;
  AugmentParams augment;
  FilterConfig filter;
  Schedule schedule = Schedule::per_pixel;
  double tonemap_log_min = -5.5;
  double tonemap_log_max = 0.0;

  SimParams sim;
  double threshold_spread = 0.0;  // per-pixel scale drawn from [1 - s, 1 + s]
  std::string scene;
  int scene_width = 64;
  int scene_height = 64;
  double scene_duration = 2.0;
  double scene_fps = 500.0;

  EvaluateOptions evaluate;

  /// Applies one `key = value` setting. Throws ValidationError on an unknown
  /// key or a malformed value.
  void set(const std::string& key, const std::string& value);
  void apply(const std::map<std::string, std::string>& values);
  /// Resolved settings in config-file syntax.
  std::string dump() const;
};

/// Merges a config file (if given) under the explicit overrides.
RunConfig resolve_config(const std::optional<fs::path>& config_file,
                         const std::map<std::string, std::string>& overrides);

int cmd_reconstruct(const RunConfig& config);
int cmd_simulate(const RunConfig& config);
int cmd_evaluate(const RunConfig& config);
int cmd_fit_crf(const RunConfig& config);

/// Runs `body` and maps library exceptions to exit codes, printing the
/// message to stderr.
int guarded(const std::function<int()>& body);

}  // namespace evhdr::cli
