// Copyright 2026 The corpuskit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "corpuskit/corpus.hpp"
#include "corpuskit/lr_schedule.hpp"
#include "support.hpp"

using namespace corpuskit;
using namespace corpuskit::schedule;

namespace {

WsdConfig standard() { return {6000, 0.0025, 40000, 0.0005, 715000, 0.1, 0.0}; }

}  // namespace

TEST_CASE("standard schedule hits its constants exactly") {
  const auto c = standard();
  CHECK(c.decay_steps() == 71500);
  CHECK(c.decay_start() == 643500);
  CHECK(lr_at(c, 0) == 0.0);
  CHECK(lr_at(c, 3000) == 0.00125);
  CHECK(lr_at(c, 6000) == 0.0025);
  CHECK(lr_at(c, 45999) == 0.0025);
  CHECK(lr_at(c, 46000) == 0.0005);
  CHECK(lr_at(c, 643500) == 0.0005);
  CHECK(lr_at(c, 715000) == 0.0);
  CHECK(lr_at(c, 643500 + 71500 / 2) == doctest::Approx(0.00025).epsilon(1e-15));
  CHECK_THROWS_AS(lr_at(c, -1), Error);
  CHECK_THROWS_AS(lr_at(c, 715001), Error);
}

TEST_CASE("decay length rounds up fractional steps") {
  WsdConfig c{0, 1.0, 0, 1.0, 15, 0.1, 0.0};
  CHECK(c.decay_steps() == 2);
  CHECK(lr_at(c, 0) == 1.0);
  CHECK(lr_at(c, 13) == 1.0);
  CHECK(lr_at(c, 14) == 0.5);
}

TEST_CASE("property: schedule is monotone within phases and bounded") {
  testing::Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    WsdConfig c;
    c.total_steps = 10 + static_cast<std::int64_t>(rng.below(5000));
    c.decay_fraction = 0.01 + 0.5 * rng.uniform();
    const auto room = c.total_steps - c.decay_steps();
    c.warmup_steps = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(room) + 1));
    c.stable_steps_at_peak = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(room - c.warmup_steps) + 1));
    c.peak_lr = 1e-4 + rng.uniform();
    c.post_drop_lr = c.peak_lr * (0.01 + 0.99 * rng.uniform());
    c.floor_lr = c.post_drop_lr * rng.uniform();
    double prev = -1.0;
    for (const auto& [step, lr] : emit_schedule(c, 1 + static_cast<std::int64_t>(rng.below(50)))) {
      REQUIRE(lr >= 0.0);
      REQUIRE(lr <= c.peak_lr);
      if (step < c.warmup_steps) REQUIRE(lr >= prev);
      if (step >= c.decay_start()) {
        REQUIRE(lr <= c.post_drop_lr);
        REQUIRE(lr >= c.floor_lr);
        if (step > c.decay_start()) REQUIRE(lr <= prev);
      }
      prev = lr;
    }
    REQUIRE(lr_at(c, c.total_steps) == c.floor_lr);
  }
}

TEST_CASE("validation") {
  auto c = standard();
  c.total_steps = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = standard();
  c.post_drop_lr = 0.01;
  CHECK_THROWS_AS(c.validate(), Error);
  c = standard();
  c.stable_steps_at_peak = 700000;
  CHECK_THROWS_AS(c.validate(), Error);
  c = standard();
  c.decay_fraction = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = standard();
  c.floor_lr = 0.001;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("emission, TSV and JSON round-trip") {
  const auto c = standard();
  const auto rows = emit_schedule(c, 100000);
  CHECK(rows.front().first == 0);
  CHECK(rows.back().first == 715000);
  CHECK(std::is_sorted(rows.begin(), rows.end()));
  bool has_boundary = false;
  for (const auto& r : rows) has_boundary = has_boundary || r.first == 46000;
  CHECK(has_boundary);
  const auto tsv = schedule_to_tsv({{0, 0.0}, {6000, 0.5}});
  CHECK(tsv == "step\tlr\n0\t0\n6000\t0.5\n");
  const auto back = WsdConfig::from_json(c.to_json());
  CHECK(back.total_steps == c.total_steps);
  CHECK(back.post_drop_lr == c.post_drop_lr);
  CHECK_THROWS_AS(emit_schedule(c, 0), Error);
}
