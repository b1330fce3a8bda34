// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "motionwarp/core.hpp"
#include "motionwarp/scheduler.hpp"
#include "motionwarp/segmenter.hpp"

namespace motionwarp {

struct Trajectory {
    std::string character;
    std::vector<std::optional<Point>> centers;  // absent where the mask is empty
};

/// Bounding-box centers per frame. Throws Error(NotFound) if every mask is
/// empty and Error(Precondition) for fewer than two frames.
Trajectory track_trajectory(std::span<const Mask> masks, std::string_view character);

enum class Verdict : std::uint8_t { Correct, Wrong, Skipped };

struct CorrectnessResult {
    int correct = 0;    // moving transitions
    int evaluated = 0;
    int motionless_correct = 0;
    int motionless_evaluated = 0;
    int skipped = 0;    // a center was absent
    std::vector<Verdict> verdicts;  // one per transition

    /// correct / evaluated over moving transitions; Error(UndefinedMetric)
    /// when none was evaluated.
    double accuracy() const;
    std::optional<double> motionless_accuracy() const;
};

/// Scores every transition: a moving transition is correct iff the cosine
/// between the planned and observed displacement is positive (a static
/// object is wrong); a motionless one is correct iff it moved at most
/// sigma / 2. Throws Error(UndefinedMetric) if nothing could be scored.
CorrectnessResult score_motion(const Trajectory& trajectory, std::span<const Direction> plan, int sigma);

/// Headline accuracy, moving transitions only.
double motion_correctness(const Trajectory& trajectory, std::span<const Direction> plan, int sigma);

std::vector<Direction> reversed_plan(std::span<const Direction> plan);

struct CharacterScore {
    std::string name;
    std::vector<Direction> plan;
    Trajectory trajectory;
    std::optional<CorrectnessResult> result;
    std::string note;  // why no result, when absent
};

struct RunReport {
    std::string prompt;
    std::optional<PipelineConfig> config;
    std::vector<CharacterScore> characters;
    std::vector<AnchorEntry> anchors;
    std::vector<Slice> slices;
    std::vector<std::string> warnings;
};

/// JSON document with a stable key order; see README.md.
std::string emit_report(const RunReport& report);

}  // namespace motionwarp
