// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace snapens {

enum class ScheduleKind { kCyclicCosine, kStep, kConstant };

std::string to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(const std::string& name);

// Multiply the learning rate by `multiplier` once t > floor(fraction * T).
struct StepDrop {
  double fraction = 0.0;
  double multiplier = 1.0;

  bool operator==(const StepDrop&) const = default;
};

// Learning-rate schedule over iterations t = 1..total_iterations.
struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::kCyclicCosine;
  double alpha0 = 0.1;
  std::int64_t total_iterations = 1;
  std::int64_t cycles = 1;  // cyclic only
  std::vector<StepDrop> step_drops = default_step_drops();

  // x0.1 at 50% and again at 75% of training.
  static std::vector<StepDrop> default_step_drops() { return {{0.5, 0.1}, {0.75, 0.1}}; }

  static ScheduleSpec cyclic(double alpha0, std::int64_t total_iterations, std::int64_t cycles);
  static ScheduleSpec step(double alpha0, std::int64_t total_iterations,
                           std::vector<StepDrop> drops = default_step_drops());
  static ScheduleSpec constant(double alpha0, std::int64_t total_iterations);

  // ceil(T / M); only meaningful for the cyclic kind.
  std::int64_t cycle_length() const;

  // Throws ConfigError naming the schedule field that is invalid.
  void validate() const;

  bool operator==(const ScheduleSpec&) const = default;
};

// Learning rate at iteration t (1-based).
//   cyclic:   alpha0 / 2 * (cos(pi * ((t - 1) mod L) / L) + 1), L = ceil(T / M)
//   step:     alpha0 times every multiplier whose boundary floor(fraction * T) < t
//   constant: alpha0
double lr_at(const ScheduleSpec& spec, std::int64_t t);

// True when iteration t closes a cycle: t mod L == 0, or t == T. Throws
// InputError for non-cyclic schedules.
bool is_cycle_end(const ScheduleSpec& spec, std::int64_t t);

// 1-based cycle containing iteration t.
std::int64_t cycle_index(const ScheduleSpec& spec, std::int64_t t);

}  // namespace snapens
