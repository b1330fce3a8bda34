// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "motionwarp/core.hpp"
#include "motionwarp/diffusion.hpp"
#include "motionwarp/evaluator.hpp"
#include "motionwarp/llm.hpp"
#include "motionwarp/planner.hpp"
#include "motionwarp/scheduler.hpp"
#include "motionwarp/segmenter.hpp"
#include "motionwarp/skeleton.hpp"

namespace motionwarp {

namespace toy {
class ToyBackend;
}

/// Error raised by a pipeline stage; keeps the cause's kind so the CLI can
/// map it to an exit code.
class StageError : public Error {
public:
    StageError(std::string stage, const Error& cause)
        : Error(cause.kind(), stage + ": " + cause.what()), m_stage(std::move(stage)) {}

    const std::string& stage() const noexcept { return m_stage; }

private:
    std::string m_stage;
};

/// Denoiser, segmenter and heading source for one run.
struct Backends {
    std::unique_ptr<DenoiserBackend> denoiser;
    std::unique_ptr<SegmentationProvider> segmenter;
    std::unique_ptr<HeadingProvider> heading;
    toy::ToyBackend* toy = nullptr;  // set when the denoiser is the toy backend
};

Backends make_backends(const PipelineConfig& config);
std::unique_ptr<LlmProvider> make_llm(const PipelineConfig& config);

struct GenerateRequest {
    std::string prompt;                       // ignored when slices are given
    std::vector<std::string> slices;          // evolving-event prompts
    std::optional<std::string> camera;        // protagonist for camera mode
    std::optional<MotionPlan> plan;           // skips the planner
    std::optional<Direction> heading;         // overrides the first-frame heading
    std::filesystem::path out_dir;            // empty: nothing is written
};

struct RunResult {
    MotionPlan plan;
    std::vector<std::string> prompts;         // per slice
    FirstFrame first;
    std::vector<std::string> characters;      // segmented characters, painting order
    std::vector<std::vector<Mask>> masks;     // [frame][character], latent resolution
    std::vector<LatentGrid> composed;         // t1 latents after warping, before settling
    std::vector<LatentGrid> guides;           // toy only: warped denoiser guides
    std::vector<LatentGrid> latents;          // final x0 per frame
    std::vector<FrameImage> frames;
    SliceSchedule slices;
    std::vector<AnchorEntry> anchors;
    RunReport report;
    std::vector<std::string> warnings;
};

/// Plan for `prompt`, using the first frame for the heading prior.
FallbackPlan make_plan(const PipelineConfig& config, std::string_view prompt, const FrameImage& first_frame,
                       HeadingProvider* heading_source, const std::optional<Direction>& heading_override,
                       LlmProvider* llm);

RunResult run_generation(const PipelineConfig& config, const GenerateRequest& request);
RunResult run_generation(const PipelineConfig& config, const GenerateRequest& request, Backends& backends);

enum class EditTarget { Foreground, Background };

struct EditRequest {
    std::filesystem::path base_dir;
    EditTarget target = EditTarget::Background;
    std::string prompt;
    std::filesystem::path out_dir;
};

struct EditResult {
    std::vector<LatentGrid> fused;            // t1 latents after foreground/background fusion
    std::vector<Mask> foreground;             // per frame, latent resolution
    std::vector<LatentGrid> latents;
    std::vector<FrameImage> frames;
};

EditResult run_edit(const PipelineConfig& overrides, const EditRequest& request);

struct EvalRequest {
    std::filesystem::path mask_dir;
    std::filesystem::path plan_path;
    int sigma = 32;  // in mask pixels; only used for motionless transitions
};

/// Scores `mask_<char>_%03d.png` sequences against a plan JSON.
RunReport run_eval(const EvalRequest& request);

struct SkeletonResult {
    SkeletonPlan plan;
    std::vector<Pose> poses;
    std::vector<FrameImage> frames;
    std::vector<std::string> warnings;
};

SkeletonResult run_skeleton(const PipelineConfig& config, std::string_view prompt,
                            const std::filesystem::path& out_dir);

/// File-name safe character name.
std::string file_stem(std::string_view name);

}  // namespace motionwarp
