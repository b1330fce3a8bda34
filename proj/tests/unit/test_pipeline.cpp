// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <sys/wait.h>

#include "motionwarp/image_io.hpp"
#include "motionwarp/pipeline.hpp"
#include "motionwarp/wire.hpp"
#include "temp_dir.hpp"

using namespace motionwarp;
namespace fs = std::filesystem;

namespace {

PipelineConfig small_config() {
    PipelineConfig c;
    c.image_size = 256;
    c.sigma = 2;
    return c;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MOTIONWARP_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string frame_name(const std::string& prefix, int f) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%03d", prefix.c_str(), f);
    return buf;
}

}  // namespace

TEST_CASE("in-memory generation") {
    GenerateRequest req;
    req.prompt = "a red square moving right";
    const RunResult r = run_generation(small_config(), req);
    CHECK(r.frames.size() == 8);
    CHECK(r.latents.size() == 8);
    CHECK(r.characters == std::vector<std::string>{"red square"});
    CHECK(r.anchors.size() == 8);
    REQUIRE(r.report.characters.size() == 1);
    CHECK(r.report.characters[0].result->accuracy() == 1.0);
    // The square moves sigma cells per frame at latent resolution.
    const Point c0 = mask_center(r.masks[0][0]);
    const Point c7 = mask_center(r.masks[7][0]);
    CHECK(c7.x - c0.x == 14.0);
    CHECK(c7.y == c0.y);
}

TEST_CASE("written runs are deterministic and complete") {
    test::TempDir dir;
    GenerateRequest req;
    req.prompt = "a bird flying up";
    req.out_dir = dir.path() / "a";
    run_generation(small_config(), req);
    req.out_dir = dir.path() / "b";
    run_generation(small_config(), req);
    for (int f = 0; f < 8; ++f) {
        const std::string frame = frame_name("frame", f) + ".png";
        CHECK(read_file(dir.path() / "a" / frame) == read_file(dir.path() / "b" / frame));
        CHECK(fs::exists(dir.path() / "a" / (frame_name("mask_bird", f) + ".png")));
        CHECK(fs::exists(dir.path() / "a" / "latents" / (frame_name("t1", f) + ".bin")));
    }
    CHECK(read_text(dir.path() / "a" / "report.json") == read_text(dir.path() / "b" / "report.json"));
    CHECK(fs::exists(dir.path() / "a" / "plan.json"));
    CHECK(fs::exists(dir.path() / "a" / "run.json"));
    CHECK_FALSE(fs::exists(dir.path() / ".a.partial"));

    PipelineConfig other = small_config();
    other.seed = 43;
    req.out_dir.clear();
    const RunResult r43 = run_generation(other, req);
    CHECK(r43.report.characters[0].result->accuracy() == 1.0);
}

TEST_CASE("evaluation reads written mask sequences") {
    test::TempDir dir;
    GenerateRequest req;
    req.prompt = "a car moving left";
    req.out_dir = dir.path() / "run";
    run_generation(small_config(), req);
    const RunReport report = run_eval({dir.path() / "run", dir.path() / "run" / "plan.json", 32});
    REQUIRE(report.characters.size() == 1);
    CHECK(report.characters[0].result->accuracy() == 1.0);

    fs::remove(dir.path() / "run" / (frame_name("mask_car", 4) + ".png"));
    try {
        run_eval({dir.path() / "run", dir.path() / "run" / "plan.json", 32});
        FAIL("expected not found");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotFound);
    }
}

TEST_CASE("background edit keeps foreground cells at t1") {
    test::TempDir dir;
    GenerateRequest req;
    req.prompt = "a red square moving right on gray";
    req.out_dir = dir.path() / "base";
    const RunResult base = run_generation(small_config(), req);
    const EditResult edit =
        run_edit(PipelineConfig{}, {dir.path() / "base", EditTarget::Background, "grass", dir.path() / "bg"});
    REQUIRE(edit.fused.size() == 8);
    std::size_t kept = 0;
    std::size_t changed = 0;
    for (std::size_t f = 0; f < 8; ++f) {
        const auto& m = edit.foreground[f];
        for (int y = 0; y < m.height(); ++y) {
            for (int x = 0; x < m.width(); ++x) {
                for (int c = 0; c < 3; ++c) {
                    if (m.at(x, y)) {
                        kept += edit.fused[f].at(c, y, x) == base.composed[f].at(c, y, x);
                    } else {
                        changed += edit.fused[f].at(c, y, x) != base.composed[f].at(c, y, x);
                    }
                }
            }
        }
    }
    std::size_t fg_cells = 0;
    for (const auto& m : edit.foreground) fg_cells += m.count() * 3;
    CHECK(fg_cells > 0);
    CHECK(kept == fg_cells);
    CHECK(changed > 0);
    CHECK(fs::exists(dir.path() / "bg" / "frame_007.png"));
    CHECK(fs::exists(dir.path() / "bg" / "edit.json"));
}

TEST_CASE("foreground edit keeps background cells at t1") {
    test::TempDir dir;
    GenerateRequest req;
    req.prompt = "a red square moving right on gray";
    req.out_dir = dir.path() / "base";
    const RunResult base = run_generation(small_config(), req);
    const EditResult edit = run_edit(PipelineConfig{}, {dir.path() / "base", EditTarget::Foreground,
                                                        "a blue square on gray", dir.path() / "fg"});
    for (std::size_t f = 0; f < 8; ++f) {
        const auto& m = edit.foreground[f];
        bool ok = true;
        for (int y = 0; y < m.height(); ++y)
            for (int x = 0; x < m.width(); ++x)
                for (int c = 0; c < 3; ++c)
                    if (!m.at(x, y)) ok = ok && edit.fused[f].at(c, y, x) == base.composed[f].at(c, y, x);
        CHECK(ok);
    }
    try {
        run_edit(PipelineConfig{}, {dir.path() / "missing", EditTarget::Foreground, "x", dir.path() / "o"});
        FAIL("expected state error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::State);
    }
}

TEST_CASE("skeleton run writes frames and poses") {
    test::TempDir dir;
    const SkeletonResult r = run_skeleton(small_config(), "a man waving", dir.path() / "skel");
    CHECK(r.frames.size() == 8);
    CHECK(fs::exists(dir.path() / "skel" / "skeleton_007.png"));
    const auto poses = nlohmann::json::parse(read_text(dir.path() / "skel" / "poses.json"));
    CHECK(poses["poses"].size() == 8);
}

TEST_CASE("stage errors keep their kind") {
    GenerateRequest req;
    req.prompt = "a purple unicorn dancing";
    try {
        run_generation(small_config(), req);
        FAIL("expected an error");
    } catch (const StageError& e) {
        CHECK(e.kind() == ErrorKind::SceneCompile);
        CHECK(e.stage() == "first_frame");
    }
    CHECK(file_stem("red square") == "red_square");
}

TEST_CASE("command-line exit codes") {
    test::TempDir dir;
    const std::string out = (dir.path() / "cli").string();
    CHECK(run_cli("") == 1);
    CHECK(run_cli("generate") == 1);
    CHECK(run_cli("plan --prompt \"a car driving\" --frames 1") == 1);
    CHECK(run_cli("plan --prompt \"a bird flying up\" --size 128") == 0);
    CHECK(run_cli("generate --prompt \"a bird flying up\" --size 128 --out " + out) == 0);
    CHECK(fs::exists(dir.path() / "cli" / "frame_007.png"));
    CHECK(run_cli("eval --masks " + out + " --plan " + out + "/plan.json --out " + out + "/eval.json") == 0);
    CHECK(nlohmann::json::parse(read_text(dir.path() / "cli" / "eval.json"))["mean_accuracy"] == 1.0);
    CHECK(run_cli("generate --prompt \"a bird flying up\" --backend bridge --bridge-url http://127.0.0.1:1 --out " +
                  out + "2") == 2);
    CHECK(run_cli("generate --prompt \"a purple unicorn\" --size 128 --out " + out + "3") == 3);
    CHECK(run_cli("edit --base " + out + " --out " + out + "4") == 1);
    CHECK(run_cli("skeleton --prompt \"a man jumping\" --size 128 --out " + out + "5") == 0);
    CHECK(run_cli("generate --prompt \"a bird flying up\" --size 128 --seeds 1..2 --out " + out + "6") == 0);
    CHECK(fs::exists(dir.path() / "cli6" / "seed_2" / "report.json"));
}
