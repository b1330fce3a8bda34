// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "motionwarp/core.hpp"
#include "motionwarp/planner.hpp"

namespace motionwarp {

struct NodePos {
    int x = 0;
    int y = 0;
    friend bool operator==(const NodePos&, const NodePos&) = default;
};

/// Indexed like kSkeletonNodes.
using Pose = std::array<NodePos, 10>;

/// Bones as index pairs into kSkeletonNodes.
std::span<const std::pair<int, int>> skeleton_bones();

/// Upright figure centred in a size x size frame; "left" nodes sit on the
/// image's left.
Pose default_pose(int size);

/// Pose per frame (F of them). Each node moves by direction_to_delta(.., sigma)
/// and is clamped to [0, size - 1]. Throws Error(Precondition) if the
/// initial pose leaves the frame.
std::vector<Pose> integrate_skeleton(const SkeletonPlan& plan, const Pose& initial, int sigma, int size);

inline constexpr std::array<std::uint8_t, 3> kBoneColor = {200, 200, 200};
inline constexpr std::array<std::uint8_t, 3> kJointColor = {255, 64, 64};

int joint_radius(int size);

/// Stick figures on black: anti-aliased bones, then one solid disc per node.
std::vector<FrameImage> render_skeleton_frames(std::span<const Pose> poses, int size);

std::string poses_to_json(std::span<const Pose> poses);

}  // namespace motionwarp
