// Copyright 2026 The snapens Authors
// SPDX-License-Identifier: Apache-2.0

#include "snapens/schedule.hpp"

#include <cmath>
#include <numbers>

#include "snapens/error.hpp"

namespace snapens {

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kCyclicCosine:
      return "cyclic_cosine";
    case ScheduleKind::kStep:
      return "step";
    case ScheduleKind::kConstant:
      return "constant";
  }
  return "unknown";
}

ScheduleKind parse_schedule_kind(const std::string& name) {
  if (name == "cyclic_cosine") return ScheduleKind::kCyclicCosine;
  if (name == "step") return ScheduleKind::kStep;
  if (name == "constant") return ScheduleKind::kConstant;
  throw ConfigError("schedule.kind", "unknown schedule kind '" + name + "'");
}

ScheduleSpec ScheduleSpec::cyclic(double alpha0, std::int64_t total_iterations,
                                  std::int64_t cycles) {
  ScheduleSpec spec;
  spec.kind = ScheduleKind::kCyclicCosine;
  spec.alpha0 = alpha0;
  spec.total_iterations = total_iterations;
  spec.cycles = cycles;
  spec.validate();
  return spec;
}

ScheduleSpec ScheduleSpec::step(double alpha0, std::int64_t total_iterations,
                                std::vector<StepDrop> drops) {
  ScheduleSpec spec;
  spec.kind = ScheduleKind::kStep;
  spec.alpha0 = alpha0;
  spec.total_iterations = total_iterations;
  spec.step_drops = std::move(drops);
  spec.validate();
  return spec;
}

ScheduleSpec ScheduleSpec::constant(double alpha0, std::int64_t total_iterations) {
  ScheduleSpec spec;
  spec.kind = ScheduleKind::kConstant;
  spec.alpha0 = alpha0;
  spec.total_iterations = total_iterations;
  spec.validate();
  return spec;
}

std::int64_t ScheduleSpec::cycle_length() const {
  return (total_iterations + cycles - 1) / cycles;
}

void ScheduleSpec::validate() const {
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) {
    throw ConfigError("schedule.alpha0", "must be a positive finite number");
  }
  if (total_iterations < 1) {
    throw ConfigError("schedule.total_iterations", "must be at least 1");
  }
  if (kind == ScheduleKind::kCyclicCosine) {
    if (cycles < 1) throw ConfigError("schedule.cycles", "must be at least 1");
    if (cycles > total_iterations) {
      throw ConfigError("schedule.cycles", "exceeds the number of iterations");
    }
  }
  if (kind == ScheduleKind::kStep) {
    double previous = 0.0;
    for (const StepDrop& drop : step_drops) {
      if (!(drop.fraction > previous && drop.fraction <= 1.0)) {
        throw ConfigError("schedule.step_fractions",
                          "fractions must be strictly increasing within (0, 1]");
      }
      if (!(drop.multiplier > 0.0) || !std::isfinite(drop.multiplier)) {
        throw ConfigError("schedule.step_fractions", "multipliers must be positive");
      }
      previous = drop.fraction;
    }
  }
}

namespace {

void check_iteration(const ScheduleSpec& spec, std::int64_t t) {
  if (t < 1 || t > spec.total_iterations) {
    throw InputError("iteration " + std::to_string(t) + " outside [1, " +
                     std::to_string(spec.total_iterations) + "]");
  }
}

}  // namespace

double lr_at(const ScheduleSpec& spec, std::int64_t t) {
  check_iteration(spec, t);
  switch (spec.kind) {
    case ScheduleKind::kCyclicCosine: {
      const std::int64_t length = spec.cycle_length();
      const double phase =
          static_cast<double>((t - 1) % length) / static_cast<double>(length);
      return spec.alpha0 / 2.0 * (std::cos(std::numbers::pi * phase) + 1.0);
    }
    case ScheduleKind::kStep: {
      double lr = spec.alpha0;
      for (const StepDrop& drop : spec.step_drops) {
        const auto boundary = static_cast<std::int64_t>(
            std::floor(drop.fraction * static_cast<double>(spec.total_iterations)));
        if (t > boundary) lr *= drop.multiplier;
      }
      return lr;
    }
    case ScheduleKind::kConstant:
      return spec.alpha0;
  }
  return spec.alpha0;
}

bool is_cycle_end(const ScheduleSpec& spec, std::int64_t t) {
  if (spec.kind != ScheduleKind::kCyclicCosine) {
    throw InputError("is_cycle_end requires a cyclic_cosine schedule");
  }
  check_iteration(spec, t);
  return t % spec.cycle_length() == 0 || t == spec.total_iterations;
}

std::int64_t cycle_index(const ScheduleSpec& spec, std::int64_t t) {
  if (spec.kind != ScheduleKind::kCyclicCosine) return 1;
  check_iteration(spec, t);
  return (t - 1) / spec.cycle_length() + 1;
}

}  // namespace snapens
