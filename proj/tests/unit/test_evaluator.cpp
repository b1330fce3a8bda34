// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <nlohmann/json.hpp>

#include "motionwarp/evaluator.hpp"
#include "motionwarp/warp.hpp"

using namespace motionwarp;

namespace {

Mask square(int x0, int y0, int size = 4, int grid = 64) {
    Mask m(grid, grid);
    for (int y = y0; y < y0 + size; ++y)
        for (int x = x0; x < x0 + size; ++x) m.set(x, y, true);
    return m;
}

Trajectory path(std::vector<std::optional<Point>> centers) { return {"obj", std::move(centers)}; }

}  // namespace

TEST_CASE("trajectory tracking") {
    std::vector<Mask> masks;
    for (int f = 0; f < 5; ++f) masks.push_back(square(4 + 4 * f, 10));
    const Trajectory t = track_trajectory(masks, "sq");
    REQUIRE(t.centers.size() == 5);
    for (int f = 1; f < 5; ++f) {
        CHECK(t.centers[f]->x - t.centers[f - 1]->x == 4.0);
        CHECK(t.centers[f]->y == t.centers[f - 1]->y);
    }
    masks[3] = Mask(64, 64);
    const Trajectory gap = track_trajectory(masks, "sq");
    CHECK_FALSE(gap.centers[3].has_value());
    CHECK(gap.centers[2] == t.centers[2]);
    CHECK(gap.centers[4] == t.centers[4]);

    const std::vector<Mask> still(3, square(1, 1));
    const Trajectory s = track_trajectory(still, "sq");
    CHECK(s.centers[0] == s.centers[2]);

    const std::vector<Mask> none(3, Mask(8, 8));
    CHECK_THROWS_AS(track_trajectory(none, "x"), Error);
    const std::vector<Mask> single(1, square(0, 0));
    CHECK_THROWS_AS(track_trajectory(single, "x"), Error);
}

TEST_CASE("cosine sign scoring") {
    const Trajectory right = path({Point{0, 0}, Point{4, 0}});
    CHECK(motion_correctness(right, std::vector{Direction::Right}, 4) == 1.0);
    CHECK(motion_correctness(right, std::vector{Direction::Left}, 4) == 0.0);
    CHECK(motion_correctness(right, std::vector{Direction::Up}, 4) == 0.0);
    CHECK(motion_correctness(right, std::vector{Direction::RightUp}, 4) == 1.0);
    CHECK(motion_correctness(path({Point{0, 0}, Point{0, -4}}), std::vector{Direction::Up}, 4) == 1.0);
    CHECK(motion_correctness(path({Point{0, 0}, Point{0, 0}}), std::vector{Direction::Down}, 4) == 0.0);
}

TEST_CASE("motionless transitions use a sigma/2 radius") {
    const Trajectory t = path({Point{0, 0}, Point{2, 0}, Point{4.5, 0}, Point{8, 0}});
    const auto r = score_motion(t, std::vector{Direction::Motionless, Direction::Motionless, Direction::Right}, 4);
    CHECK(r.motionless_evaluated == 2);
    CHECK(r.motionless_correct == 1);
    CHECK(r.accuracy() == 1.0);
    CHECK(*r.motionless_accuracy() == 0.5);

    const auto only_still = score_motion(path({Point{0, 0}, Point{0, 0}}), std::vector{Direction::Motionless}, 4);
    CHECK_THROWS_AS(only_still.accuracy(), Error);
    CHECK(*only_still.motionless_accuracy() == 1.0);
}

TEST_CASE("absent centers are skipped") {
    const Trajectory t = path({Point{0, 0}, std::nullopt, Point{8, 0}, Point{12, 0}});
    const auto r = score_motion(t, std::vector{Direction::Right, Direction::Right, Direction::Right}, 4);
    CHECK(r.skipped == 2);
    CHECK(r.evaluated == 1);
    CHECK(r.verdicts == std::vector{Verdict::Skipped, Verdict::Skipped, Verdict::Correct});
    try {
        score_motion(path({Point{0, 0}, std::nullopt}), std::vector{Direction::Right}, 4);
        FAIL("expected undefined metric");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UndefinedMetric);
    }
    CHECK_THROWS_AS(score_motion(t, std::vector{Direction::Right}, 4), Error);
}

TEST_CASE("mixed ratio and reversal") {
    std::vector<std::optional<Point>> c;
    for (int i = 0; i < 8; ++i) c.push_back(Point{i * 4.0, 0});
    std::vector<Direction> plan(7, Direction::Right);
    plan[1] = Direction::Left;
    plan[5] = Direction::Left;
    CHECK(motion_correctness(path(c), plan, 4) == doctest::Approx(5.0 / 7.0));
    CHECK(motion_correctness(path(c), reversed_plan(plan), 4) == doctest::Approx(2.0 / 7.0));
    CHECK(reversed_plan(std::vector{Direction::LeftUp, Direction::Motionless}) ==
          std::vector{Direction::RightDown, Direction::Motionless});
}

TEST_CASE("report document") {
    RunReport empty;
    const auto doc = nlohmann::json::parse(emit_report(empty));
    CHECK(doc["characters"].empty());
    CHECK(doc["mean_accuracy"].is_null());
    CHECK(doc["config"].is_null());

    RunReport r;
    r.prompt = "a car";
    r.config = PipelineConfig{};
    std::vector<std::optional<Point>> c;
    for (int i = 0; i < 8; ++i) c.push_back(Point{i * 4.0, 0});
    CharacterScore car{"car", std::vector<Direction>(7, Direction::Right), path(c), std::nullopt, ""};
    car.result = score_motion(car.trajectory, car.plan, 4);
    r.characters.push_back(car);
    CharacterScore ghost{"ghost", std::vector<Direction>(7, Direction::Up), {}, std::nullopt, "not found"};
    r.characters.push_back(ghost);
    r.anchors = {{0, 0}, {1, 0}};
    r.slices = {{"a car", 0, 8}};
    const std::string text = emit_report(r);
    CHECK(text == emit_report(r));
    const auto j = nlohmann::ordered_json::parse(text);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"version", "prompt", "config", "schedule", "characters", "mean_accuracy",
                                           "anchor_schedule", "slices", "warnings"});
    CHECK(j["characters"][0]["accuracy"] == 1.0);
    CHECK(j["characters"][0]["correct"] == 7);
    CHECK(j["characters"][1]["accuracy"].is_null());
    CHECK(j["characters"][1]["note"] == "not found");
    CHECK(j["mean_accuracy"] == 1.0);
    CHECK(j["schedule"]["t1"] == 20);
    CHECK(j["config"]["gamma"] == 0.6);
}
