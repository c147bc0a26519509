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
#include <span>
#include <string>
#include <vector>

#include "evhdr/crf.hpp"
#include "evhdr/event.hpp"
#include "evhdr/frame_model.hpp"
#include "evhdr/image.hpp"
#include "evhdr/metrics.hpp"

namespace evhdr::io {

namespace fs = std::filesystem;

// Parse failures are ValidationErrors whose message starts with "path:line:".

/// Events as `t_us,x,y,p` with p in {0, 1}. Lines starting with '#' and a
/// leading header row are skipped; the file must be sorted by t_us.
std::vector<Event> read_events(const fs::path& path);
void write_events(const fs::path& path, std::span<const Event> events);

/// `response,irradiance,weight` with 256 rows. The weight column may be absent.
CrfTable read_crf(const fs::path& path);
void write_crf(const fs::path& path, const CrfTable& crf);

Image8 read_pgm(const fs::path& path);
void write_pgm(const fs::path& path, const Image8& image);
/// PGM, or PNG when built with libpng, chosen by extension.
Image8 read_gray8(const fs::path& path);

/// Raw little-endian float32, row-major.
ImageF read_f32(const fs::path& path, int width, int height);
void write_f32(const fs::path& path, const ImageF& image);

struct FrameEntry {
  std::int64_t timestamp_us = 0;
  std::int64_t exposure_us = 0;
  std::string filename;
};

/// `timestamp_us,exposure_us,filename`; filenames are relative to the manifest.
std::vector<FrameEntry> read_frame_manifest(const fs::path& path);
void write_frame_manifest(const fs::path& path, std::span<const FrameEntry> entries);
std::vector<FrameObservation> load_frames(const fs::path& manifest);

struct OutputEntry {
  std::int64_t timestamp_us = 0;
  std::string pgm;
  std::string f32;
};

/// `timestamp_us,filename_pgm,filename_f32`; the PGM supplies the dimensions
/// of the float frame.
std::vector<OutputEntry> read_output_manifest(const fs::path& path);
void write_output_manifest(const fs::path& path, std::span<const OutputEntry> entries);
std::vector<TimedImage> load_float_frames(const fs::path& manifest);

/// `key = value` lines with '#' comments. Duplicate keys are an error.
std::map<std::string, std::string> read_config(const fs::path& path);

}  // namespace evhdr::io
