// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include "motionwarp/skeleton.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace motionwarp {

namespace {

constexpr std::array<std::pair<int, int>, 10> kBones = {{
    {0, 1}, {0, 2}, {1, 2},  // head, shoulders
    {1, 3}, {2, 4},          // arms
    {0, 5},                  // spine
    {5, 6}, {5, 7},          // thighs
    {6, 8}, {7, 9},          // shins
}};

double segment_distance(double px, double py, NodePos a, NodePos b) {
    const double vx = b.x - a.x;
    const double vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = 0.0;
    if (len2 > 0.0) {
        t = std::clamp(((px - a.x) * vx + (py - a.y) * vy) / len2, 0.0, 1.0);
    }
    return std::hypot(px - (a.x + t * vx), py - (a.y + t * vy));
}

void draw_line(FrameImage& img, NodePos a, NodePos b, double width) {
    const double half = width / 2.0;
    const int pad = static_cast<int>(std::ceil(half + 1.0));
    const int x0 = std::max(0, std::min(a.x, b.x) - pad);
    const int x1 = std::min(img.width - 1, std::max(a.x, b.x) + pad);
    const int y0 = std::max(0, std::min(a.y, b.y) - pad);
    const int y1 = std::min(img.height - 1, std::max(a.y, b.y) + pad);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double coverage = std::clamp(half + 0.5 - segment_distance(x, y, a, b), 0.0, 1.0);
            if (coverage <= 0.0) continue;
            auto* p = img.pixel(x, y);
            for (int c = 0; c < 3; ++c) {
                const auto v = static_cast<std::uint8_t>(std::lround(coverage * kBoneColor[static_cast<std::size_t>(c)]));
                p[c] = std::max(p[c], v);
            }
        }
    }
}

void draw_disc(FrameImage& img, NodePos center, int radius) {
    for (int y = center.y - radius; y <= center.y + radius; ++y) {
        for (int x = center.x - radius; x <= center.x + radius; ++x) {
            if (x < 0 || y < 0 || x >= img.width || y >= img.height) continue;
            const int dx = x - center.x;
            const int dy = y - center.y;
            if (dx * dx + dy * dy > radius * radius) continue;
            auto* p = img.pixel(x, y);
            std::copy(kJointColor.begin(), kJointColor.end(), p);
        }
    }
}

}  // namespace

std::span<const std::pair<int, int>> skeleton_bones() { return kBones; }

Pose default_pose(int size) {
    constexpr std::array<std::array<double, 2>, 10> kLayout = {{
        {0.50, 0.20}, {0.40, 0.32}, {0.60, 0.32}, {0.32, 0.50}, {0.68, 0.50},
        {0.50, 0.55}, {0.43, 0.71}, {0.57, 0.71}, {0.41, 0.88}, {0.59, 0.88},
    }};
    Pose pose;
    for (std::size_t i = 0; i < pose.size(); ++i) {
        pose[i] = {static_cast<int>(std::lround(kLayout[i][0] * (size - 1))),
                   static_cast<int>(std::lround(kLayout[i][1] * (size - 1)))};
    }
    return pose;
}

std::vector<Pose> integrate_skeleton(const SkeletonPlan& plan, const Pose& initial, int sigma, int size) {
    if (plan.frame_count < 1) {
        throw Error(ErrorKind::Precondition, "skeleton plan has no frames");
    }
    for (const auto& node : initial) {
        if (node.x < 0 || node.y < 0 || node.x >= size || node.y >= size) {
            throw Error(ErrorKind::Precondition, "initial pose leaves the frame");
        }
    }
    std::vector<Pose> poses{initial};
    for (int k = 1; k < plan.frame_count; ++k) {
        Pose next = poses.back();
        for (std::size_t n = 0; n < next.size(); ++n) {
            const Delta d = direction_to_delta(plan.nodes[n].at(static_cast<std::size_t>(k - 1)), sigma);
            next[n].x = std::clamp(next[n].x + d.dx, 0, size - 1);
            next[n].y = std::clamp(next[n].y + d.dy, 0, size - 1);
        }
        poses.push_back(next);
    }
    return poses;
}

int joint_radius(int size) { return std::max(2, size / 64); }

std::vector<FrameImage> render_skeleton_frames(std::span<const Pose> poses, int size) {
    if (poses.empty()) {
        throw Error(ErrorKind::Precondition, "no poses to render");
    }
    const double width = std::max(1.0, size / 128.0);
    const int radius = joint_radius(size);
    std::vector<FrameImage> frames;
    frames.reserve(poses.size());
    for (const auto& pose : poses) {
        FrameImage img(size, size);
        for (const auto& [a, b] : kBones) {
            draw_line(img, pose[static_cast<std::size_t>(a)], pose[static_cast<std::size_t>(b)], width);
        }
        for (const auto& node : pose) {
            draw_disc(img, node, radius);
        }
        frames.push_back(std::move(img));
    }
    return frames;
}

std::string poses_to_json(std::span<const Pose> poses) {
    nlohmann::ordered_json doc;
    doc["nodes"] = std::vector<std::string>(kSkeletonNodes.begin(), kSkeletonNodes.end());
    nlohmann::ordered_json frames = nlohmann::ordered_json::array();
    for (const auto& pose : poses) {
        nlohmann::ordered_json f = nlohmann::ordered_json::array();
        for (const auto& n : pose) f.push_back({n.x, n.y});
        frames.push_back(std::move(f));
    }
    doc["poses"] = frames;
    return doc.dump(2) + "\n";
}

}  // namespace motionwarp
