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

#include <limits>
#include <map>

#include "evhdr/errors.hpp"
#include "evhdr/event.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace evhdr {
namespace {

EventNoiseParams params_with(double proc, double iso, double ref, double rho = 0.01,
                             double cap = 1.0) {
  EventNoiseParams p;
  p.sigma2_proc = proc;
  p.sigma2_iso = iso;
  p.sigma2_ref = ref;
  p.rho_bar = rho;
  p.q_cap = cap;
  return p;
}

Event ev(double t, int x, int y, int polarity = 1) {
  return {t, static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
          static_cast<std::int8_t>(polarity)};
}

TEST(QProcess, DirectSubstitution) {
  EXPECT_NEAR(q_process(0.7, 0.5, params_with(0.1, 0, 0)), 0.02, 1e-15);
}

TEST(QProcess, ZeroElapsedTime) { EXPECT_EQ(q_process(1.0, 1.0, params_with(5.0, 0, 0)), 0.0); }

TEST(QProcess, OutOfOrderIsAContractViolation) {
  EXPECT_THROW(q_process(0.4, 0.5, {}), ContractViolation);
}

TEST(QIso, DirectSubstitution) {
  EXPECT_NEAR(q_iso(2.0, 1.9, 0.0, params_with(0, 0.5, 0)), 0.05, 1e-15);
}

TEST(QIso, SimultaneousNeighbour) { EXPECT_EQ(q_iso(2.0, 2.0, 0.0, {}), 0.0); }

TEST(QIso, NeverFiredNeighbourhoodIsCapped) {
  const auto p = params_with(0, 0.5, 0, 0.01, 0.3);
  EXPECT_NEAR(q_iso(0.2, std::nullopt, 0.0, p), 0.1, 1e-15);
  EXPECT_EQ(q_iso(10.0, std::nullopt, 0.0, p), 0.3);
}

TEST(QIso, DenseBurstKeepsIsolationTiny) {
  // Every pixel fires once per millisecond.
  const int w = 6, h = 5;
  std::vector<Event> events;
  for (int k = 1; k <= 50; ++k) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) events.push_back(ev(k * 1e-3, x, y, (k + x) % 2 ? 1 : -1));
    }
  }
  const auto p = params_with(0, 0.7, 0);
  EventNoiseModel model(w, h, 0.0, p);
  std::size_t checked = 0;
  for (const Event& e : events) {
    const auto c = model.observe(e);
    if (e.t > 1e-3) {
      EXPECT_LE(c.isolated, 0.001 * p.sigma2_iso + 1e-18);
      ++checked;
    }
  }
  EXPECT_EQ(checked, static_cast<std::size_t>(49 * w * h));
}

TEST(QRef, BranchAboveRho) { EXPECT_EQ(q_ref(0.02, 0.0, params_with(0, 0, 0.3)), 0.0); }
TEST(QRef, BranchBelowRho) { EXPECT_EQ(q_ref(0.005, 0.0, params_with(0, 0, 0.3)), 0.3); }
TEST(QRef, BoundaryCountsAsRefractory) {
  EXPECT_EQ(q_ref(0.01, 0.0, params_with(0, 0, 0.3)), 0.3);
}

TEST(QTotal, ZeroDeltaChargesOnlyRefractoryTerm) {
  const auto p = params_with(0.5, 0.5, 0.2);
  EventNoiseModel model(3, 3, 1.0, p);
  model.observe(ev(1.0, 0, 0));
  const auto c = model.observe(ev(1.0, 1, 0));  // neighbour fired at the same instant
  EXPECT_EQ(c.process, 0.0);
  EXPECT_EQ(c.isolated, 0.0);
  EXPECT_EQ(c.refractory, 0.2);
  EXPECT_EQ(c.total, 0.2);
}

TEST(QTotal, ComponentSum) {
  // q_proc = 0.1 * 0.2 = 0.02, q_iso = 0.5 * 0.1 = 0.05, dt > rho.
  const auto p = params_with(0.1, 0.5, 0.3, 0.01, 10.0);
  EventNoiseModel model(3, 1, 0.0, p);
  model.observe(ev(0.5, 0, 0));
  model.observe(ev(0.6, 1, 0));
  const auto c = model.observe(ev(0.7, 0, 0));
  EXPECT_NEAR(c.total, 0.07, 1e-15);
}

TEST(QTotal, CappedAtQCap) {
  const auto p = params_with(1.0, 1.0, 1.0, 0.01, 0.25);
  EventNoiseModel model(2, 2, 0.0, p);
  EXPECT_EQ(model.q_total(ev(5.0, 0, 0)), 0.25);
}

TEST(QTotal, RejectsRepeatedTimestampAtOnePixel) {
  EventNoiseModel model(2, 2, 0.0, {});
  model.observe(ev(0.5, 1, 1));
  EXPECT_THROW(model.observe(ev(0.5, 1, 1)), StreamError);
  EXPECT_THROW(model.observe(ev(0.4, 1, 1)), StreamError);
}

TEST(QTotal, RejectsBadEvents) {
  EventNoiseModel model(2, 2, 1.0, {});
  EXPECT_THROW(model.observe(ev(1.5, 2, 0)), StreamError);
  EXPECT_THROW(model.observe(ev(1.5, 0, 0, 0)), StreamError);
  EXPECT_THROW(model.observe(ev(0.5, 0, 0)), StreamError);
}

TEST(QTotal, UnsortedStreamIsRejected) {
  const std::vector<Event> events = {ev(0.2, 0, 0), ev(0.1, 1, 1)};
  EXPECT_THROW(compute_event_covariances(events, 2, 2, 0.0, {}), StreamError);
}

TEST(QTotalProperty, MatchesHistoryRescan) {
  testing::Gen gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = gen.integer(2, 9), h = gen.integer(2, 9);
    auto p = params_with(gen.uniform(0, 0.5), gen.uniform(0, 0.5), gen.uniform(0, 0.5),
                         gen.uniform(0, 0.05), gen.uniform(0.05, 2.0));
    p.neighborhood_radius = gen.integer(1, 2);
    const double t0 = gen.uniform(0, 1);
    const auto events = gen.event_stream(w, h, 400, t0, gen.uniform(0.01, 1.0));
    const auto q = compute_event_covariances(events, w, h, t0, p);
    const auto want = testing::rescan_event_covariances(events, t0, p);
    ASSERT_EQ(q.size(), want.size());
    for (std::size_t i = 0; i < q.size(); ++i) ASSERT_EQ(q[i], want[i]) << "event " << i;
  }
}

TEST(QTotalProperty, BoundedAndDeterministic) {
  testing::Gen gen(12);
  const auto p = params_with(0.3, 0.3, 0.3, 0.02, 0.4);
  const auto events = gen.event_stream(16, 12, 3000, 0.0, 0.5);
  const auto a = compute_event_covariances(events, 16, 12, 0.0, p);
  const auto b = compute_event_covariances(events, 16, 12, 0.0, p);
  EXPECT_EQ(a, b);
  for (double q : a) {
    EXPECT_GE(q, 0.0);
    EXPECT_LE(q, p.q_cap);
  }
}

TEST(QTotalProperty, PeriodicEventsWithCoFiringNeighbour) {
  const double period = 0.05;  // > rho_bar
  const auto p = params_with(0.2, 0.4, 0.3, 0.01, 10.0);
  EventNoiseModel model(2, 1, 0.0, p);
  for (int k = 1; k <= 20; ++k) {
    model.observe(ev(k * period, 1, 0));
    const auto c = model.observe(ev(k * period, 0, 0));
    if (k > 1) EXPECT_NEAR(c.total, p.sigma2_proc * period, 1e-15);
  }
}

TEST(QTotalProperty, RemovingNeighboursIncreasesIsolation) {
  testing::Gen gen(13);
  const auto p = params_with(0.0, 0.5, 0.0, 0.01, 100.0);
  std::vector<Event> events = {ev(0.0, 1, 1)};
  for (const Event& e : gen.event_stream(5, 5, 600, 1e-3, 1.0)) events.push_back(e);
  std::vector<Event> isolated;
  for (const Event& e : events) {
    const bool centre = e.x == 2 && e.y == 2;
    const bool neighbour = std::abs(e.x - 2) <= 1 && std::abs(e.y - 2) <= 1;
    if (centre || !neighbour) isolated.push_back(e);
  }
  EventNoiseModel full(5, 5, 0.0, p), sparse(5, 5, 0.0, p);
  std::vector<double> with, without;
  for (const Event& e : events) {
    const auto c = full.observe(e);
    if (e.x == 2 && e.y == 2) with.push_back(c.isolated);
  }
  for (const Event& e : isolated) {
    const auto c = sparse.observe(e);
    if (e.x == 2 && e.y == 2) without.push_back(c.isolated);
  }
  ASSERT_EQ(with.size(), without.size());
  ASSERT_FALSE(with.empty());
  for (std::size_t i = 0; i < with.size(); ++i) EXPECT_GT(without[i], with[i]);
}

TEST(EventNoiseParams, ValidationRejectsNegatives) {
  EXPECT_THROW(params_with(-1, 0, 0).validate(), ValidationError);
  EventNoiseParams p;
  p.neighborhood_radius = 0;
  EXPECT_THROW(p.validate(), ValidationError);
}

}  // namespace
}  // namespace evhdr
