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
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <functional>

#include "evhdr/errors.hpp"
#include "evhdr/io.hpp"
#include "support/generators.hpp"

namespace evhdr {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("evhdr_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  std::string error_of(const std::function<void()>& fn) {
    try {
      fn();
    } catch (const ValidationError& e) {
      return e.what();
    }
    return "";
  }

  fs::path dir_;
};

TEST_F(IoTest, EventsRoundTrip) {
  testing::Gen gen(81);
  auto events = gen.event_stream(30, 20, 500, 0.25, 1.0);
  // Files carry whole microseconds; round-trip the expected times the same way.
  for (Event& e : events) e.t = from_microseconds(to_microseconds(e.t));
  io::write_events(dir_ / "e.csv", events);
  EXPECT_EQ(io::read_events(dir_ / "e.csv"), events);
}

TEST_F(IoTest, EventsAcceptPlainHeaderAndComments) {
  const auto path = write("e.csv", "t_us,x,y,p\n# comment\n10,1,2,1\n\n10,2,2,0\n25,1,2,0\n");
  const auto events = io::read_events(path);
  ASSERT_EQ(events.size(), 3u);
  EXPECT_EQ(events[1].polarity, -1);
  EXPECT_DOUBLE_EQ(events[2].t, 25e-6);
}

TEST_F(IoTest, EventErrorsNameTheLine) {
  EXPECT_NE(error_of([&] { io::read_events(write("a.csv", "# h\n10,1,1,1\n5,1,1,1\n")); })
                .find("a.csv:3"),
            std::string::npos);
  EXPECT_NE(error_of([&] { io::read_events(write("b.csv", "10,1,1,2\n")); }).find("b.csv:1"),
            std::string::npos);
  EXPECT_NE(error_of([&] { io::read_events(write("c.csv", "10,1,1\n")); }).find("c.csv:1"),
            std::string::npos);
  EXPECT_NE(error_of([&] { io::read_events(write("d.csv", "-3,1,1,1\n")); }).find("d.csv:1"),
            std::string::npos);
  EXPECT_NE(error_of([&] { io::read_events(dir_ / "missing.csv"); }).find("missing.csv"),
            std::string::npos);
}

TEST_F(IoTest, CrfRoundTrip) {
  const CrfTable crf = CrfTable::from_response_curve([](double i) { return 255 * std::sqrt(i); });
  io::write_crf(dir_ / "crf.csv", crf);
  const CrfTable back = io::read_crf(dir_ / "crf.csv");
  EXPECT_EQ(back.inverse_samples(), crf.inverse_samples());
  EXPECT_EQ(back.weight_samples(), crf.weight_samples());
}

TEST_F(IoTest, CrfWithoutWeightsRecomputesThem) {
  std::string text = "response,irradiance\n";
  for (int r = 0; r < 256; ++r) text += std::to_string(r) + "," + std::to_string(r / 255.0) + "\n";
  const CrfTable crf = io::read_crf(write("crf.csv", text));
  EXPECT_NEAR(crf.weighting(100), 1.0, 1e-12);
  EXPECT_EQ(crf.weighting(0), kWeightFloor);
}

TEST_F(IoTest, CrfRejectsShortTables) {
  EXPECT_THROW(io::read_crf(write("crf.csv", "response,irradiance,weight\n0,0,1\n1,0.5,1\n")),
               ValidationError);
}

TEST_F(IoTest, PgmRoundTrip) {
  Image8 img(7, 5);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<std::uint8_t>(i * 7);
  io::write_pgm(dir_ / "a.pgm", img);
  EXPECT_EQ(io::read_pgm(dir_ / "a.pgm"), img);
  EXPECT_EQ(io::read_gray8(dir_ / "a.pgm"), img);
}

TEST_F(IoTest, PgmWithCommentsInHeader) {
  std::string text = "P5\n# made by hand\n2 1\n255\n";
  text += static_cast<char>(12);
  text += static_cast<char>(200);
  const Image8 img = io::read_pgm(write("h.pgm", text));
  EXPECT_EQ(img(0, 0), 12);
  EXPECT_EQ(img(1, 0), 200);
  EXPECT_THROW(io::read_pgm(write("t.pgm", "P5\n4 4\n255\nab")), ValidationError);
  EXPECT_THROW(io::read_pgm(write("p2.pgm", "P2\n1 1\n255\n7\n")), ValidationError);
}

TEST_F(IoTest, F32RoundTrip) {
  testing::Gen gen(82);
  ImageF img(9, 4);
  for (double& v : img.pixels()) v = static_cast<float>(gen.uniform(-3, 3));
  io::write_f32(dir_ / "a.f32", img);
  EXPECT_EQ(fs::file_size(dir_ / "a.f32"), 9u * 4u * 4u);
  EXPECT_EQ(io::read_f32(dir_ / "a.f32", 9, 4), img);
  EXPECT_THROW(io::read_f32(dir_ / "a.f32", 10, 4), ValidationError);
}

TEST_F(IoTest, FrameManifestLoadsRelativeFrames) {
  Image8 img(3, 2, 77);
  io::write_pgm(dir_ / "f0.pgm", img);
  io::write_pgm(dir_ / "f1.pgm", img);
  const std::vector<io::FrameEntry> entries = {{5000, 10000, "f0.pgm"}, {55000, 10000, "f1.pgm"}};
  io::write_frame_manifest(dir_ / "frames.csv", entries);
  const auto frames = io::load_frames(dir_ / "frames.csv");
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_DOUBLE_EQ(frames[1].tau, 0.055);
  EXPECT_DOUBLE_EQ(frames[1].exposure, 0.01);
  EXPECT_EQ(frames[0].raw(2, 1), 77.0);
}

TEST_F(IoTest, OutputManifestRoundTrip) {
  ImageF f(4, 3, 0.5);
  io::write_pgm(dir_ / "o.pgm", Image8(4, 3));
  io::write_f32(dir_ / "o.f32", f);
  io::write_output_manifest(dir_ / "manifest.csv",
                            std::vector<io::OutputEntry>{{123456, "o.pgm", "o.f32"}});
  const auto frames = io::load_float_frames(dir_ / "manifest.csv");
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_DOUBLE_EQ(frames[0].t, 0.123456);
  EXPECT_EQ(frames[0].image, f);
}

TEST_F(IoTest, ConfigParsing) {
  const auto path = write("run.cfg", "# settings\nmode = constant-gain  # inline\n\n k=2.5\nempty =\n");
  const auto kv = io::read_config(path);
  EXPECT_EQ(kv.at("mode"), "constant-gain");
  EXPECT_EQ(kv.at("k"), "2.5");
  EXPECT_EQ(kv.at("empty"), "");
  EXPECT_NE(error_of([&] { io::read_config(write("b.cfg", "a = 1\na = 2\n")); }).find("b.cfg:2"),
            std::string::npos);
  EXPECT_NE(error_of([&] { io::read_config(write("c.cfg", "novalue\n")); }).find("c.cfg:1"),
            std::string::npos);
}

}  // namespace
}  // namespace evhdr
