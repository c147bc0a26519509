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
#include "cli.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "evhdr/crf.hpp"
#include "evhdr/errors.hpp"
#include "evhdr/io.hpp"
#include "evhdr/log.hpp"

namespace evhdr::cli {

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kPartialMarker = ".partial";

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ValidationError("setting '" + key + "': expected a number, got '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used == v.size()) return i;
  } catch (const std::exception&) {
  }
  throw ValidationError("setting '" + key + "': expected an integer, got '" + v + "'");
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const unsigned long long u = std::stoull(v, &used);
    if (used == v.size() && v.find('-') == std::string::npos) return u;
  } catch (const std::exception&) {
  }
  throw ValidationError("setting '" + key + "': expected an unsigned integer, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ValidationError("setting '" + key + "': expected true or false, got '" + v + "'");
}

struct Field {
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define EVHDR_DOUBLE(name, member)                                                  \
  Field {                                                                           \
    name, [](RunConfig& c, const std::string& v) { c.member = to_double(name, v); }, \
        [](const RunConfig& c) { return fmt_double(c.member); }                     \
  }
#define EVHDR_INT(name, member)                                                                \
  Field {                                                                                      \
    name,                                                                                      \
        [](RunConfig& c, const std::string& v) { c.member = static_cast<int>(to_int(name, v)); }, \
        [](const RunConfig& c) { return std::to_string(c.member); }                            \
  }
#define EVHDR_BOOL(name, member)                                                   \
  Field {                                                                          \
    name, [](RunConfig& c, const std::string& v) { c.member = to_bool(name, v); }, \
        [](const RunConfig& c) { return std::string(c.member ? "true" : "false"); } \
  }
#define EVHDR_PATH(name, member)                                           \
  Field {                                                                  \
    name, [](RunConfig& c, const std::string& v) { c.member = v; },        \
        [](const RunConfig& c) { return c.member.string(); }               \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      EVHDR_PATH("events", events),
      EVHDR_PATH("frames", frames),
      EVHDR_PATH("crf", crf),
      EVHDR_PATH("output", output),
      EVHDR_PATH("reference", reference),
      EVHDR_PATH("reconstruction", reconstruction),
      EVHDR_PATH("video", video),
      EVHDR_PATH("stack", stack),
      EVHDR_PATH("sim_crf", sim_crf),
      EVHDR_INT("threads", threads),
      Field{"seed", [](RunConfig& c, const std::string& v) { c.seed = to_u64("seed", v); },
            [](const RunConfig& c) { return std::to_string(c.seed); }},
      EVHDR_DOUBLE("sigma2_proc", event_noise.sigma2_proc),
      EVHDR_DOUBLE("sigma2_iso", event_noise.sigma2_iso),
      EVHDR_DOUBLE("sigma2_ref", event_noise.sigma2_ref),
      EVHDR_DOUBLE("rho_bar", event_noise.rho_bar),
      EVHDR_INT("neighborhood_radius", event_noise.neighborhood_radius),
      EVHDR_DOUBLE("q_cap", event_noise.q_cap),
      EVHDR_DOUBLE("sigma2_im", frame_noise.sigma2_im),
      EVHDR_DOUBLE("i_offset", frame_noise.i_offset),
      Field{"r_max",
            [](RunConfig& c, const std::string& v) {
              if (v.empty() || v == "auto") {
                c.r_max.reset();
              } else {
                c.r_max = to_double("r_max", v);
              }
            },
            [](const RunConfig& c) { return c.r_max ? fmt_double(*c.r_max) : std::string("auto"); }},
      EVHDR_DOUBLE("c_nominal", augment.c_nominal),
      EVHDR_INT("n_min", augment.n_min),
      EVHDR_DOUBLE("eps_l", augment.eps_l),
      EVHDR_BOOL("guard_saturated", augment.guard_saturated),
      EVHDR_INT("edi_refinements", augment.edi_refinements),
      EVHDR_DOUBLE("p0", filter.p0),
      Field{"mode",
            [](RunConfig& c, const std::string& v) {
              try {
                c.filter.mode = parse_filter_mode(v);
              } catch (const std::exception&) {
                throw ValidationError("setting 'mode': expected akf or constant-gain, got '" + v +
                                      "'");
              }
            },
            [](const RunConfig& c) { return to_string(c.filter.mode); }},
      EVHDR_DOUBLE("k", filter.k_const),
      Field{"output_rate",
            [](RunConfig& c, const std::string& v) {
              if (v.empty() || v == "frames") {
                c.filter.output_rate.reset();
              } else {
                c.filter.output_rate = to_double("output_rate", v);
              }
            },
            [](const RunConfig& c) {
              return c.filter.output_rate ? fmt_double(*c.filter.output_rate)
                                          : std::string("frames");
            }},
      Field{"schedule",
            [](RunConfig& c, const std::string& v) {
              if (v == "per-pixel") {
                c.schedule = Schedule::per_pixel;
              } else if (v == "streaming") {
                c.schedule = Schedule::streaming;
              } else {
                throw ValidationError("setting 'schedule': expected per-pixel or streaming");
              }
            },
            [](const RunConfig& c) {
              return std::string(c.schedule == Schedule::streaming ? "streaming" : "per-pixel");
            }},
      EVHDR_DOUBLE("tonemap_log_min", tonemap_log_min),
      EVHDR_DOUBLE("tonemap_log_max", tonemap_log_max),
      EVHDR_DOUBLE("c_true", sim.c_true),
      EVHDR_DOUBLE("threshold_spread", threshold_spread),
      EVHDR_DOUBLE("refractory", sim.refractory),
      EVHDR_DOUBLE("event_noise_rate", sim.event_noise_rate),
      EVHDR_DOUBLE("exposure", sim.exposure),
      EVHDR_DOUBLE("frame_period", sim.frame_period),
      EVHDR_DOUBLE("saturation_low", sim.saturation_low),
      EVHDR_DOUBLE("saturation_high", sim.saturation_high),
      Field{"scene", [](RunConfig& c, const std::string& v) { c.scene = v; },
            [](const RunConfig& c) { return c.scene; }},
      EVHDR_INT("scene_width", scene_width),
      EVHDR_INT("scene_height", scene_height),
      EVHDR_DOUBLE("scene_duration", scene_duration),
      EVHDR_DOUBLE("scene_fps", scene_fps),
      EVHDR_DOUBLE("timestamp_tolerance", evaluate.timestamp_tolerance),
      EVHDR_BOOL("normalize", evaluate.normalize),
      EVHDR_BOOL("align", evaluate.align),
  };
  return table;
}

#undef EVHDR_DOUBLE
#undef EVHDR_INT
#undef EVHDR_BOOL
#undef EVHDR_PATH

void require_file(const fs::path& path, const char* what) {
  if (path.empty()) throw ValidationError(std::string("no ") + what + " given");
  if (!fs::is_regular_file(path)) {
    throw ValidationError(std::string(what) + " not found: " + path.string());
  }
}

void require_output(const fs::path& path) {
  if (path.empty()) throw ValidationError("no output directory given (--output)");
  if (fs::exists(path) && !fs::is_directory(path)) {
    throw ValidationError("output path exists and is not a directory: " + path.string());
  }
}

/// Owns the `.partial` marker in an output directory. The marker is removed
/// only when commit() runs, so an interrupted write stays flagged.
class OutputDir {
 public:
  explicit OutputDir(const fs::path& dir) : dir_(dir) {
    fs::create_directories(dir_);
    std::ofstream(dir_ / kPartialMarker) << "incomplete output; rerun the command\n";
  }
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;
  ~OutputDir() {
    if (!committed_) {
      std::cerr << "evhdr: output in " << dir_.string() << " is incomplete (marked "
                << kPartialMarker << ")\n";
    }
  }
  const fs::path& path() const { return dir_; }
  void commit() {
    fs::remove(dir_ / kPartialMarker);
    committed_ = true;
  }

 private:
  fs::path dir_;
  bool committed_ = false;
};

std::string frame_name(const char* prefix, std::size_t k, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06zu.%s", prefix, k, ext);
  return buf;
}

Image8 tonemap_log(const ImageF& log_image, double lo, double hi) {
  Image8 out(log_image.width(), log_image.height());
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = std::round((log_image[i] - lo) * scale);
    out[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
  }
  return out;
}

ImageF log_of(const ImageF& linear, double i_offset) {
  ImageF out(linear.width(), linear.height());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(std::max(linear[i], 0.0) + i_offset);
  return out;
}

void write_run_log(const fs::path& path, const char* command, const RunConfig& config,
                   const std::vector<std::string>& notes) {
  std::ofstream out(path);
  out << "# evhdr " << kVersion << ' ' << command << "\n";
  for (const std::string& n : notes) out << "# " << n << "\n";
  out << config.dump();
  if (!out) throw ValidationError("cannot write " + path.string());
}

ReconstructionParams reconstruction_params(const RunConfig& c) {
  ReconstructionParams p;
  p.event_noise = c.event_noise;
  p.frame_noise = c.frame_noise;
  p.augment = c.augment;
  p.filter = c.filter;
  p.threads = c.threads;
  p.schedule = c.schedule;
  return p;
}

GroundTruthVideo load_video(const fs::path& manifest) {
  GroundTruthVideo v;
  for (TimedImage& f : io::load_float_frames(manifest)) {
    v.timestamps.push_back(f.t);
    v.frames.push_back(std::move(f.image));
  }
  return v;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const Field& f : fields()) {
    if (key == f.key) {
      f.set(*this, value);
      return;
    }
  }
  throw ValidationError("unknown setting '" + key + "'");
}

void RunConfig::apply(const std::map<std::string, std::string>& values) {
  for (const auto& [k, v] : values) set(k, v);
}

std::string RunConfig::dump() const {
  std::ostringstream out;
  for (const Field& f : fields()) out << f.key << " = " << f.get(*this) << "\n";
  return out.str();
}

RunConfig resolve_config(const std::optional<fs::path>& config_file,
                         const std::map<std::string, std::string>& overrides) {
  RunConfig config;
  if (config_file) {
    require_file(*config_file, "config file");
    const fs::path base = config_file->parent_path();
    auto values = io::read_config(*config_file);
    // Relative paths inside a config file are relative to that file.
    for (const char* key : {"events", "frames", "crf", "output", "reference", "reconstruction",
                            "video", "stack", "sim_crf"}) {
      auto it = values.find(key);
      if (it != values.end() && !it->second.empty() && fs::path(it->second).is_relative()) {
        it->second = (base / it->second).string();
      }
    }
    config.apply(values);
  }
  config.apply(overrides);
  if (config.threads < 1) throw ValidationError("threads must be at least 1");
  return config;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const CrfFitError& e) {
    std::cerr << "evhdr: error: CRF fit failed: " << e.what() << " (levels " << e.uncovered_lo()
              << ".." << e.uncovered_hi() << ")\n";
    return kValidation;
  } catch (const NumericalError& e) {
    std::cerr << "evhdr: numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const ValidationError& e) {
    std::cerr << "evhdr: error: " << e.what() << "\n";
    return kValidation;
  } catch (const StreamError& e) {
    std::cerr << "evhdr: error: event stream: " << e.what() << "\n";
    return kValidation;
  } catch (const ContractViolation& e) {
    std::cerr << "evhdr: error: " << e.what() << "\n";
    return kValidation;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "evhdr: error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "evhdr: numerical error: " << e.what() << "\n";
    return kNumerical;
  }
}

int cmd_reconstruct(const RunConfig& config) {
  require_file(config.events, "event file (--events)");
  require_file(config.frames, "frame manifest (--frames)");
  require_file(config.crf, "CRF file (--crf)");
  require_output(config.output);

  const ReconstructionParams params = reconstruction_params(config);
  params.validate();
  const std::vector<Event> events = io::read_events(config.events);
  const std::vector<FrameObservation> frames = io::load_frames(config.frames);
  CrfTable crf = io::read_crf(config.crf);
  if (config.r_max) crf.set_r_max(config.r_max);

  const ReconstructionResult result = reconstruct(events, frames, crf, params);
  log_info("reconstruct: ", result.stats.events_used, " of ", result.stats.events_total,
           " events used, ", result.frames.size(), " frames");

  OutputDir out(config.output);
  std::vector<io::OutputEntry> manifest;
  for (std::size_t k = 0; k < result.frames.size(); ++k) {
    const ReconstructedFrame& f = result.frames[k];
    io::OutputEntry e{to_microseconds(f.t), frame_name("frame", k, "pgm"),
                      frame_name("frame", k, "f32")};
    io::write_pgm(out.path() / e.pgm,
                  tonemap_log(f.log_intensity, config.tonemap_log_min, config.tonemap_log_max));
    io::write_f32(out.path() / e.f32, to_linear(f.log_intensity, config.frame_noise.i_offset));
    manifest.push_back(std::move(e));
  }
  io::write_output_manifest(out.path() / "manifest.csv", manifest);
  write_run_log(out.path() / "run_log.txt", "reconstruct", config,
                {"events_total " + std::to_string(result.stats.events_total),
                 "events_used " + std::to_string(result.stats.events_used),
                 "events_outside_span " + std::to_string(result.stats.events_outside_span),
                 "frames_written " + std::to_string(result.frames.size()),
                 "skipped_outputs " + std::to_string(result.stats.skipped_outputs.size())});
  out.commit();
  return kOk;
}

int cmd_simulate(const RunConfig& config) {
  require_output(config.output);
  if (config.video.empty() == config.scene.empty()) {
    throw ValidationError("simulate needs exactly one of --video or --scene");
  }
  GroundTruthVideo video;
  if (!config.video.empty()) {
    require_file(config.video, "video manifest (--video)");
    video = load_video(config.video);
  } else {
    video = make_scene(config.scene, config.scene_width, config.scene_height,
                       config.scene_duration, config.scene_fps);
  }
  video.validate();

  SimParams sim = config.sim;
  sim.seed = config.seed;
  sim.i_offset = config.frame_noise.i_offset;
  if (!config.sim_crf.empty()) {
    require_file(config.sim_crf, "simulation CRF (sim_crf)");
    sim.crf = io::read_crf(config.sim_crf);
  }
  if (!(config.threshold_spread >= 0 && config.threshold_spread < 1)) {
    throw ValidationError("threshold_spread must lie in [0, 1)");
  }
  if (config.threshold_spread > 0) {
    sim.threshold_scale = ImageF(video.width(), video.height());
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> u(1.0 - config.threshold_spread,
                                             1.0 + config.threshold_spread);
    for (double& s : sim.threshold_scale.pixels()) s = u(rng);
  }
  sim.validate();

  const std::vector<Event> events = generate_events(video, sim, config.threads);
  const std::vector<FrameObservation> ldr = render_ldr_frames(video, sim);
  if (ldr.empty()) throw ValidationError("video is shorter than one exposure");

  OutputDir out(config.output);
  io::write_events(out.path() / "events.csv", events);

  fs::create_directories(out.path() / "frames");
  std::vector<io::FrameEntry> frame_entries;
  for (std::size_t k = 0; k < ldr.size(); ++k) {
    Image8 raw(ldr[k].raw.width(), ldr[k].raw.height());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = static_cast<std::uint8_t>(ldr[k].raw[i]);
    io::FrameEntry e{to_microseconds(ldr[k].tau), to_microseconds(ldr[k].exposure),
                     frame_name("ldr", k, "pgm")};
    io::write_pgm(out.path() / "frames" / e.filename, raw);
    frame_entries.push_back(std::move(e));
  }
  io::write_frame_manifest(out.path() / "frames" / "frames.csv", frame_entries);

  fs::create_directories(out.path() / "ground_truth");
  std::vector<io::OutputEntry> gt_entries;
  for (std::size_t k = 0; k < ldr.size(); ++k) {
    const ImageF gt = ground_truth_frame(video, ldr[k].tau, sim.i_offset);
    io::OutputEntry e{to_microseconds(ldr[k].tau), frame_name("gt", k, "pgm"),
                      frame_name("gt", k, "f32")};
    io::write_pgm(out.path() / "ground_truth" / e.pgm,
                  tonemap_log(log_of(gt, sim.i_offset), config.tonemap_log_min,
                              config.tonemap_log_max));
    io::write_f32(out.path() / "ground_truth" / e.f32, gt);
    gt_entries.push_back(std::move(e));
  }
  io::write_output_manifest(out.path() / "ground_truth" / "manifest.csv", gt_entries);
  io::write_crf(out.path() / "crf.csv", clipped_crf(sim));

  std::ofstream manifest(out.path() / "sim_manifest.txt");
  manifest << "# evhdr " << kVersion << " simulate\n";
  manifest << "seed = " << sim.seed << "\n";
  manifest << "c_true = " << fmt_double(sim.c_true) << "\n";
  manifest << "threshold_spread = " << fmt_double(config.threshold_spread) << "\n";
  manifest << "refractory = " << fmt_double(sim.refractory) << "\n";
  manifest << "event_noise_rate = " << fmt_double(sim.event_noise_rate) << "\n";
  manifest << "exposure = " << fmt_double(sim.exposure) << "\n";
  manifest << "frame_period = " << fmt_double(sim.frame_period) << "\n";
  manifest << "saturation_low = " << fmt_double(sim.saturation_low) << "\n";
  manifest << "saturation_high = " << fmt_double(sim.saturation_high) << "\n";
  manifest << "i_offset = " << fmt_double(sim.i_offset) << "\n";
  manifest << "sim_crf = " << (config.sim_crf.empty() ? "identity" : config.sim_crf.string()) << "\n";
  manifest << "source = " << (config.scene.empty() ? config.video.string() : "scene:" + config.scene)
           << "\n";
  manifest << "# events " << events.size() << ", frames " << ldr.size() << "\n";
  if (!manifest) throw ValidationError("cannot write sim_manifest.txt");
  manifest.close();
  write_run_log(out.path() / "run_log.txt", "simulate", config,
                {"events " + std::to_string(events.size()), "frames " + std::to_string(ldr.size())});
  out.commit();
  return kOk;
}

int cmd_evaluate(const RunConfig& config) {
  require_file(config.reconstruction, "reconstruction manifest (--reconstruction)");
  require_file(config.reference, "reference manifest (--reference)");
  if (!config.output.empty()) require_output(config.output);

  const std::vector<TimedImage> rec = io::load_float_frames(config.reconstruction);
  const std::vector<TimedImage> ref = io::load_float_frames(config.reference);
  EvaluateOptions options = config.evaluate;
  options.i_offset = config.frame_noise.i_offset;
  options.threads = config.threads;
  const MetricReport report = evaluate_sequence(rec, ref, options);
  for (std::size_t k : report.skipped) {
    std::cerr << "evhdr: frame " << k << " skipped: timestamp mismatch beyond "
              << options.timestamp_tolerance * 1e3 << " ms\n";
  }
  if (report.evaluated() == 0) throw ValidationError("no frame pairs could be evaluated");

  std::ostringstream csv;
  csv.precision(10);
  csv << "frame,timestamp_us,mse,ssim" << (options.align ? ",mse_aligned,ssim_aligned" : "") << "\n";
  for (const FrameMetric& m : report.frames) {
    csv << m.frame << ',' << to_microseconds(m.t) << ',' << m.mse << ',' << m.ssim;
    if (options.align) csv << ',' << *m.mse_aligned << ',' << *m.ssim_aligned;
    csv << "\n";
  }
  csv << "# summary,frames=" << report.evaluated() << ",skipped=" << report.skipped.size()
      << ",mse=" << report.mean_mse << ",ssim=" << report.mean_ssim << "\n";

  char line[160];
  std::string table = "                MSE (×10⁻²)   SSIM\n";
  std::snprintf(line, sizeof line, "%-16s%-14.4f%.4f\n", "reconstruction", report.mean_mse * 100,
                report.mean_ssim);
  table += line;
  if (options.align) {
    std::snprintf(line, sizeof line, "%-16s%-14.4f%.4f\n", "log-aligned",
                  *report.mean_mse_aligned * 100, *report.mean_ssim_aligned);
    table += line;
  }
  std::cout << table;

  if (!config.output.empty()) {
    OutputDir out(config.output);
    std::ofstream(out.path() / "metrics.csv") << csv.str();
    std::ofstream(out.path() / "summary.txt") << table;
    write_run_log(out.path() / "run_log.txt", "evaluate", config,
                  {"evaluated " + std::to_string(report.evaluated()),
                   "skipped " + std::to_string(report.skipped.size())});
    out.commit();
  } else {
    std::cout << csv.str();
  }
  return kOk;
}

int cmd_fit_crf(const RunConfig& config) {
  require_file(config.stack, "exposure stack manifest (--stack)");
  require_output(config.output);

  const fs::path dir = config.stack.parent_path();
  std::vector<ExposureSample> stack;
  for (const io::FrameEntry& e : io::read_frame_manifest(config.stack)) {
    stack.push_back({from_microseconds(e.exposure_us), io::read_gray8(dir / e.filename)});
  }
  const CrfTable crf = fit_crf(stack);

  OutputDir out(config.output);
  io::write_crf(out.path() / "crf.csv", crf);
  io::read_crf(out.path() / "crf.csv");
  write_run_log(out.path() / "run_log.txt", "fit-crf", config,
                {"exposures " + std::to_string(stack.size())});
  out.commit();
  return kOk;
}

}  // namespace evhdr::cli
