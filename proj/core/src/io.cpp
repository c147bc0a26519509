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
#include "evhdr/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "evhdr/errors.hpp"

#ifdef EVHDR_HAVE_PNG
#include <png.h>
#endif

namespace evhdr::io {

namespace {

[[noreturn]] void fail_at(const fs::path& path, std::size_t line, const std::string& what) {
  throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + what);
}

[[noreturn]] void fail_file(const fs::path& path, const std::string& what) {
  throw ValidationError(path.string() + ": " + what);
}

std::ifstream open_in(const fs::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) fail_file(path, "cannot open for reading");
  return in;
}

std::ofstream open_out(const fs::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) fail_file(path, "cannot open for writing");
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& value) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  return ec == std::errc() && ptr == end;
}

bool is_digit_start(std::string_view s) {
  return !s.empty() && (std::isdigit(static_cast<unsigned char>(s.front())) || s.front() == '-' ||
                        s.front() == '+' || s.front() == '.');
}

/// Iterates data rows of a CSV, skipping blanks, '#' comments and one
/// leading non-numeric header row.
template <class Fn>
void for_each_row(const fs::path& path, Fn&& fn) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    if (!seen_data && !is_digit_start(s)) {
      seen_data = true;
      continue;
    }
    seen_data = true;
    fn(split_csv(s), lineno);
  }
}

void skip_pnm_space(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

}  // namespace

std::vector<Event> read_events(const fs::path& path) {
  std::vector<Event> events;
  std::int64_t prev = -1;
  for_each_row(path, [&](const std::vector<std::string_view>& f, std::size_t ln) {
    if (f.size() != 4) fail_at(path, ln, "expected 4 fields t_us,x,y,p");
    std::int64_t t_us = 0;
    int x = 0, y = 0, p = 0;
    if (!parse_number(f[0], t_us) || t_us < 0) fail_at(path, ln, "bad timestamp");
    if (!parse_number(f[1], x) || !parse_number(f[2], y) || x < 0 || y < 0 || x > 65535 ||
        y > 65535) {
      fail_at(path, ln, "bad pixel coordinate");
    }
    if (!parse_number(f[3], p) || (p != 0 && p != 1)) fail_at(path, ln, "polarity must be 0 or 1");
    if (t_us < prev) fail_at(path, ln, "timestamps not sorted");
    prev = t_us;
    events.push_back({from_microseconds(t_us), static_cast<std::uint16_t>(x),
                      static_cast<std::uint16_t>(y), static_cast<std::int8_t>(p ? 1 : -1)});
  });
  return events;
}

void write_events(const fs::path& path, std::span<const Event> events) {
  std::ofstream out = open_out(path);
  out << "# t_us,x,y,p\n";
  std::string buf;
  for (const Event& e : events) {
    buf.clear();
    buf += std::to_string(to_microseconds(e.t));
    buf += ',';
    buf += std::to_string(e.x);
    buf += ',';
    buf += std::to_string(e.y);
    buf += e.polarity > 0 ? ",1\n" : ",0\n";
    out << buf;
  }
  if (!out) fail_file(path, "write failed");
}

CrfTable read_crf(const fs::path& path) {
  std::vector<double> irr, wts;
  bool has_weights = true;
  for_each_row(path, [&](const std::vector<std::string_view>& f, std::size_t ln) {
    if (f.size() < 2 || f.size() > 3) fail_at(path, ln, "expected response,irradiance[,weight]");
    int r = 0;
    double v = 0, w = 0;
    if (!parse_number(f[0], r) || r != static_cast<int>(irr.size())) {
      fail_at(path, ln, "responses must run 0..255 in order");
    }
    if (!parse_number(f[1], v)) fail_at(path, ln, "bad irradiance");
    irr.push_back(v);
    if (f.size() == 3 && !f[2].empty()) {
      if (!parse_number(f[2], w)) fail_at(path, ln, "bad weight");
      wts.push_back(w);
    } else {
      has_weights = false;
    }
  });
  if (irr.size() != kCrfLevels) {
    fail_file(path, "expected " + std::to_string(kCrfLevels) + " rows, found " +
                        std::to_string(irr.size()));
  }
  try {
    if (has_weights) return CrfTable::from_inverse(irr, std::span<const double>(wts));
    return CrfTable::from_inverse(irr);
  } catch (const std::exception& e) {
    fail_file(path, e.what());
  }
}

void write_crf(const fs::path& path, const CrfTable& crf) {
  std::ofstream out = open_out(path);
  out.precision(17);
  out << "response,irradiance,weight\n";
  for (int r = 0; r < kCrfLevels; ++r) {
    out << r << ',' << crf.inverse_samples()[static_cast<std::size_t>(r)] << ','
        << crf.weight_samples()[static_cast<std::size_t>(r)] << '\n';
  }
  if (!out) fail_file(path, "write failed");
}

Image8 read_pgm(const fs::path& path) {
  std::ifstream in = open_in(path, true);
  std::string magic;
  in >> magic;
  if (magic != "P5") fail_file(path, "not a binary PGM (P5)");
  int w = 0, h = 0, maxval = 0;
  skip_pnm_space(in);
  in >> w;
  skip_pnm_space(in);
  in >> h;
  skip_pnm_space(in);
  in >> maxval;
  if (!in || w <= 0 || h <= 0) fail_file(path, "bad PGM header");
  if (maxval != 255) fail_file(path, "only 8-bit PGM is supported");
  in.get();
  Image8 img(w, h);
  in.read(reinterpret_cast<char*>(img.data()), static_cast<std::streamsize>(img.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.size())) fail_file(path, "truncated PGM");
  return img;
}

void write_pgm(const fs::path& path, const Image8& image) {
  std::ofstream out = open_out(path, true);
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.data()), static_cast<std::streamsize>(image.size()));
  if (!out) fail_file(path, "write failed");
}

Image8 read_gray8(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") {
#ifdef EVHDR_HAVE_PNG
    png_image png;
    std::memset(&png, 0, sizeof png);
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.string().c_str())) {
      fail_file(path, png.message);
    }
    png.format = PNG_FORMAT_GRAY;
    Image8 img(static_cast<int>(png.width), static_cast<int>(png.height));
    if (!png_image_finish_read(&png, nullptr, img.data(), 0, nullptr)) {
      png_image_free(&png);
      fail_file(path, png.message);
    }
    return img;
#else
    fail_file(path, "PNG support not compiled in");
#endif
  }
  return read_pgm(path);
}

ImageF read_f32(const fs::path& path, int width, int height) {
  std::ifstream in = open_in(path, true);
  ImageF img(width, height);
  std::vector<std::uint32_t> raw(img.size());
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 4));
  if (in.gcount() != static_cast<std::streamsize>(raw.size() * 4)) {
    fail_file(path, "expected " + std::to_string(raw.size() * 4) + " bytes");
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::uint32_t v = raw[i];
    if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap32(v);
    img[i] = static_cast<double>(std::bit_cast<float>(v));
  }
  return img;
}

void write_f32(const fs::path& path, const ImageF& image) {
  std::vector<std::uint32_t> raw(image.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::uint32_t v = std::bit_cast<std::uint32_t>(static_cast<float>(image[i]));
    if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap32(v);
    raw[i] = v;
  }
  std::ofstream out = open_out(path, true);
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 4));
  if (!out) fail_file(path, "write failed");
}

std::vector<FrameEntry> read_frame_manifest(const fs::path& path) {
  std::vector<FrameEntry> entries;
  for_each_row(path, [&](const std::vector<std::string_view>& f, std::size_t ln) {
    if (f.size() != 3) fail_at(path, ln, "expected timestamp_us,exposure_us,filename");
    FrameEntry e;
    if (!parse_number(f[0], e.timestamp_us) || e.timestamp_us < 0) fail_at(path, ln, "bad timestamp");
    if (!parse_number(f[1], e.exposure_us) || e.exposure_us <= 0) fail_at(path, ln, "bad exposure");
    if (f[2].empty()) fail_at(path, ln, "missing filename");
    e.filename = std::string(f[2]);
    entries.push_back(std::move(e));
  });
  return entries;
}

void write_frame_manifest(const fs::path& path, std::span<const FrameEntry> entries) {
  std::ofstream out = open_out(path);
  out << "timestamp_us,exposure_us,filename\n";
  for (const FrameEntry& e : entries) {
    out << e.timestamp_us << ',' << e.exposure_us << ',' << e.filename << '\n';
  }
  if (!out) fail_file(path, "write failed");
}

std::vector<FrameObservation> load_frames(const fs::path& manifest) {
  const fs::path dir = manifest.parent_path();
  std::vector<FrameObservation> frames;
  for (const FrameEntry& e : read_frame_manifest(manifest)) {
    const Image8 img = read_gray8(dir / e.filename);
    FrameObservation f{from_microseconds(e.timestamp_us), from_microseconds(e.exposure_us),
                       ImageF(img.width(), img.height())};
    for (std::size_t i = 0; i < img.size(); ++i) f.raw[i] = img[i];
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<OutputEntry> read_output_manifest(const fs::path& path) {
  std::vector<OutputEntry> entries;
  for_each_row(path, [&](const std::vector<std::string_view>& f, std::size_t ln) {
    if (f.size() != 3) fail_at(path, ln, "expected timestamp_us,filename_pgm,filename_f32");
    OutputEntry e;
    if (!parse_number(f[0], e.timestamp_us) || e.timestamp_us < 0) fail_at(path, ln, "bad timestamp");
    if (f[1].empty() || f[2].empty()) fail_at(path, ln, "missing filename");
    e.pgm = std::string(f[1]);
    e.f32 = std::string(f[2]);
    entries.push_back(std::move(e));
  });
  return entries;
}

void write_output_manifest(const fs::path& path, std::span<const OutputEntry> entries) {
  std::ofstream out = open_out(path);
  out << "timestamp_us,filename_pgm,filename_f32\n";
  for (const OutputEntry& e : entries) out << e.timestamp_us << ',' << e.pgm << ',' << e.f32 << '\n';
  if (!out) fail_file(path, "write failed");
}

std::vector<TimedImage> load_float_frames(const fs::path& manifest) {
  const fs::path dir = manifest.parent_path();
  std::vector<TimedImage> out;
  for (const OutputEntry& e : read_output_manifest(manifest)) {
    const Image8 shape = read_pgm(dir / e.pgm);
    out.push_back({from_microseconds(e.timestamp_us),
                   read_f32(dir / e.f32, shape.width(), shape.height())});
  }
  return out;
}

std::map<std::string, std::string> read_config(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) fail_at(path, lineno, "expected key = value");
    const std::string key(trim(s.substr(0, eq)));
    const std::string value(trim(s.substr(eq + 1)));
    if (key.empty()) fail_at(path, lineno, "empty key");
    if (!kv.emplace(key, value).second) fail_at(path, lineno, "duplicate key '" + key + "'");
  }
  return kv;
}

}  // namespace evhdr::io
