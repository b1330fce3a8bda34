// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "motionwarp/segmenter.hpp"
#include "motionwarp/warp.hpp"

using namespace motionwarp;

namespace {

LatentGrid ramp(int c, int h, int w) {
    LatentGrid g(c, h, w);
    for (std::size_t i = 0; i < g.size(); ++i) g.values()[i] = static_cast<float>(i);
    return g;
}

Mask box(int w, int h, int x0, int y0, int size) {
    Mask m(w, h);
    for (int y = y0; y < y0 + size; ++y)
        for (int x = x0; x < x0 + size; ++x) m.set(x, y, true);
    return m;
}

}  // namespace

TEST_CASE("latent shift with edge and zero fill") {
    LatentGrid g(1, 1, 4);
    g.values() = {1, 2, 3, 4};
    CHECK(shift(g, {1, 0}).values() == std::vector<float>{1, 1, 2, 3});
    CHECK(shift(g, {-2, 0}).values() == std::vector<float>{3, 4, 4, 4});
    CHECK(shift(g, {1, 0}, Fill::Zero).values() == std::vector<float>{0, 1, 2, 3});
    CHECK(shift(g, {0, 0}) == g);
    CHECK_THROWS_AS(shift(g, {4, 0}), Error);

    const LatentGrid r = ramp(2, 5, 5);
    const LatentGrid down = shift(r, {0, 2});
    CHECK(down.at(1, 4, 3) == r.at(1, 2, 3));
    CHECK(down.at(1, 0, 3) == r.at(1, 0, 3));
    CHECK(down.at(1, 1, 3) == r.at(1, 0, 3));
}

TEST_CASE("mask shift drops what leaves the grid") {
    const Mask m = box(6, 6, 4, 1, 2);
    const Mask s = shift(m, {1, 0});
    CHECK(s.count() == 2);
    CHECK(s.at(5, 1));
    CHECK(s.at(5, 2));
    CHECK(shift(shift(m, {-3, 2}), {3, -2}) == m);
}

TEST_CASE("compose moves one object and leaves the background alone") {
    LatentGrid base(1, 8, 8, 0.0f);
    LatentGrid prev = base;
    const Mask m = box(8, 8, 1, 1, 2);
    for (int y = 1; y < 3; ++y)
        for (int x = 1; x < 3; ++x) prev.at(0, y, x) = 5.0f;
    const Mask masks[] = {m};
    const Delta deltas[] = {{2, 0}};
    const Composition out = compose_next_frame(prev, masks, deltas, base);
    CHECK(out.masks[0] == box(8, 8, 3, 1, 2));
    CHECK_FALSE(out.exited[0]);
    // Object cells hold the object; the vacated cells take the edge-filled
    // warp of prev, which at x=1..2 samples prev at x=-1..0 (background).
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            const float expected = (y >= 1 && y < 3 && x >= 3 && x < 5) ? 5.0f : 0.0f;
            CHECK(out.latent.at(0, y, x) == expected);
        }
    }
}

TEST_CASE("later characters paint over earlier ones") {
    LatentGrid base(1, 6, 6, 0.0f);
    LatentGrid prev = base;
    prev.at(0, 2, 1) = 1.0f;
    prev.at(0, 2, 3) = 2.0f;
    const Mask masks[] = {box(6, 6, 1, 2, 1), box(6, 6, 3, 2, 1)};
    const Delta deltas[] = {{1, 0}, {-1, 0}};
    const Composition out = compose_next_frame(prev, masks, deltas, base);
    CHECK(out.latent.at(0, 2, 2) == 2.0f);
}

TEST_CASE("exit flag and empty masks") {
    LatentGrid base(1, 4, 4, 0.0f);
    const Mask masks[] = {box(4, 4, 3, 0, 1), Mask(4, 4)};
    const Delta deltas[] = {{1, 0}, {1, 0}};
    const Composition out = compose_next_frame(base, masks, deltas, base);
    CHECK(out.exited[0]);
    CHECK_FALSE(out.exited[1]);
    CHECK(out.masks[1].empty());
    const Mask wrong[] = {Mask(4, 4, Resolution::Image)};
    const Delta one[] = {{0, 0}};
    CHECK_THROWS_AS(compose_next_frame(base, wrong, one, base), Error);
    CHECK_THROWS_AS(compose_next_frame(base, masks, one, base), Error);
}

TEST_CASE("fusion selects per cell") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    for (int trial = 0; trial < 20; ++trial) {
        LatentGrid fg(3, 5, 7), bg(3, 5, 7);
        for (auto& v : fg.values()) v = u(rng);
        for (auto& v : bg.values()) v = u(rng);
        Mask m(7, 5);
        for (int y = 0; y < 5; ++y)
            for (int x = 0; x < 7; ++x) m.set(x, y, (rng() & 1u) != 0);
        const LatentGrid out = fuse_foreground_background(fg, bg, m);
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < 5; ++y)
                for (int x = 0; x < 7; ++x) CHECK(out.at(c, y, x) == (m.at(x, y) ? fg : bg).at(c, y, x));
    }
    CHECK_THROWS_AS(fuse_foreground_background(LatentGrid(1, 2, 2), LatentGrid(1, 2, 3), Mask(2, 2)), Error);
}

TEST_CASE("camera mode pins the protagonist") {
    MotionPlan plan;
    plan.frame_count = 4;
    plan.characters = {{"car", "car", {Direction::Right, Direction::RightUp, Direction::Motionless}},
                       {"bird", "bird", {Direction::Left, Direction::Left, Direction::Left}}};
    const MotionPlan cam = apply_camera_mode(plan, "car");
    REQUIRE(cam.characters.size() == 3);
    CHECK(cam.characters[0].name == kBackgroundSceneName);
    CHECK(cam.characters[0].directions ==
          std::vector<Direction>{Direction::Left, Direction::LeftDown, Direction::Motionless});
    CHECK(cam.characters[1].is_motionless());
    CHECK(cam.characters[2] == plan.characters[1]);
    CHECK_NOTHROW(cam.validate());
    CHECK_THROWS_AS(apply_camera_mode(plan, "horse"), Error);
}
