// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

// motionwarp command-line driver.
//
// Exit codes: 0 success, 1 usage, 2 backend, 3 pipeline stage failure.

#include <cstdio>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "motionwarp/config.hpp"
#include "motionwarp/image_io.hpp"
#include "motionwarp/pipeline.hpp"
#include "motionwarp/warp.hpp"

namespace mw = motionwarp;

namespace {

struct CommonFlags {
    std::string config_path;
    int frames = 8;
    int size = 512;
    double gamma = 0.6;
    int sigma = 4;
    std::uint64_t seed = 42;
    std::string backend = "toy";
    std::string bridge_url;
    std::string llm = "fallback";
    std::string llm_url;
    std::string llm_model;
    std::string llm_replay;
    std::string lexicon;
    int threads = 1;

    std::vector<std::pair<CLI::Option*, std::function<void(mw::PipelineConfig&)>>> setters;

    template <class T>
    void add(CLI::App& app, const std::string& name, T& value, const std::string& help,
             std::function<void(mw::PipelineConfig&)> apply) {
        setters.emplace_back(app.add_option(name, value, help)->capture_default_str(), std::move(apply));
    }

    void attach(CLI::App& app) {
        app.add_option("--config", config_path, "JSON config file; explicit flags override it");
        add(app, "--frames", frames, "frame count", [this](auto& c) { c.frame_count = frames; });
        add(app, "--size", size, "image side in pixels", [this](auto& c) { c.image_size = size; });
        add(app, "--gamma", gamma, "anchor IoU threshold", [this](auto& c) { c.gamma = gamma; });
        add(app, "--sigma", sigma, "warp step in latent cells", [this](auto& c) { c.sigma = sigma; });
        add(app, "--seed", seed, "noise seed", [this](auto& c) { c.seed = seed; });
        add(app, "--backend", backend, "toy|bridge", [this](auto& c) { c.backend = mw::parse_backend_kind(backend); });
        add(app, "--bridge-url", bridge_url, "model bridge base URL", [this](auto& c) { c.bridge_url = bridge_url; });
        add(app, "--llm", llm, "replay|http|fallback", [this](auto& c) { c.llm = mw::parse_llm_mode(llm); });
        add(app, "--llm-url", llm_url, "chat completion base URL", [this](auto& c) { c.llm_url = llm_url; });
        add(app, "--llm-model", llm_model, "chat model name", [this](auto& c) { c.llm_model = llm_model; });
        add(app, "--llm-replay", llm_replay, "transcript directory for --llm replay",
            [this](auto& c) { c.llm_replay_dir = llm_replay; });
        add(app, "--lexicon", lexicon, "verb lexicon JSON for the fallback planner",
            [this](auto& c) { c.lexicon_path = lexicon; });
        add(app, "--threads", threads, "worker threads for per-frame denoising",
            [this](auto& c) { c.threads = threads; });
    }

    mw::PipelineConfig resolve() const {
        mw::PipelineConfig config;
        if (!config_path.empty()) {
            config = mw::config_from_json(nlohmann::json::parse(mw::read_text(config_path)));
        }
        for (const auto& [opt, apply] : setters) {
            if (opt->count() > 0) apply(config);
        }
        config.validate();
        return config;
    }
};

std::optional<mw::Direction> parse_heading(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const auto d = mw::match_direction(text);
    if (!d) throw mw::VocabularyError(text);
    return d;
}

std::vector<std::string> split_slices(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto bar = text.find("||", start);
        out.push_back(text.substr(start, bar == std::string::npos ? std::string::npos : bar - start));
        if (bar == std::string::npos) break;
        start = bar + 2;
    }
    for (auto& s : out) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t") + 1);
    }
    return out;
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
    const auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            const auto v = std::stoull(text);
            return {v, v};
        }
        const auto a = std::stoull(text.substr(0, dots));
        const auto b = std::stoull(text.substr(dots + 2));
        if (b < a) throw mw::Error(mw::ErrorKind::Usage, "seed range '" + text + "' is empty");
        return {a, b};
    } catch (const std::logic_error&) {
        throw mw::Error(mw::ErrorKind::Usage, "seed range must look like 'a..b', got '" + text + "'");
    }
}

void print_summary(const mw::RunResult& r, const std::filesystem::path& out) {
    std::printf("%zu frames -> %s\n", r.frames.size(), out.string().c_str());
    for (const auto& c : r.report.characters) {
        if (c.result && c.result->evaluated > 0) {
            std::printf("  %-20s accuracy %.4f (%d/%d)\n", c.name.c_str(), c.result->accuracy(), c.result->correct,
                        c.result->evaluated);
        } else {
            std::printf("  %-20s %s\n", c.name.c_str(), c.note.empty() ? "motionless" : c.note.c_str());
        }
    }
    for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

int exit_code(const mw::Error& e) {
    switch (e.kind()) {
    case mw::ErrorKind::Usage: return 1;
    case mw::ErrorKind::Backend: return 2;
    default: return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"motionwarp: zero-shot motion-controlled video generation"};
    app.require_subcommand(1);

    // plan
    CommonFlags plan_flags;
    std::string plan_prompt, plan_heading, plan_camera, plan_out;
    bool plan_answer = false;
    auto* plan_cmd = app.add_subcommand("plan", "compile a prompt into a motion plan");
    plan_flags.attach(*plan_cmd);
    plan_cmd->add_option("--prompt", plan_prompt, "text prompt")->required();
    plan_cmd->add_option("--heading", plan_heading, "override the first-frame heading");
    plan_cmd->add_option("--camera", plan_camera, "protagonist for camera mode");
    plan_cmd->add_option("--out", plan_out, "write plan.json into this directory");
    plan_cmd->add_flag("--answer", plan_answer, "print the plan in the LLM answer format");

    // generate
    CommonFlags gen_flags;
    std::string gen_prompt, gen_heading, gen_camera, gen_slices, gen_plan, gen_out, gen_seeds;
    auto* gen_cmd = app.add_subcommand("generate", "run the full pipeline");
    gen_flags.attach(*gen_cmd);
    gen_cmd->add_option("--prompt", gen_prompt, "text prompt");
    gen_cmd->add_option("--slices", gen_slices, "evolving events: \"p1||p2||...\"");
    gen_cmd->add_option("--camera", gen_camera, "protagonist for camera mode");
    gen_cmd->add_option("--plan", gen_plan, "plan JSON to use instead of the planner");
    gen_cmd->add_option("--heading", gen_heading, "override the first-frame heading");
    gen_cmd->add_option("--seeds", gen_seeds, "seed range a..b, one run per seed");
    gen_cmd->add_option("--out", gen_out, "output directory")->required();

    // edit
    CommonFlags edit_flags;
    std::string edit_base, edit_fg, edit_bg, edit_out;
    auto* edit_cmd = app.add_subcommand("edit", "regenerate the foreground or background of a run");
    edit_flags.attach(*edit_cmd);
    edit_cmd->add_option("--base", edit_base, "directory of a previous generate run")->required();
    auto* fg_opt = edit_cmd->add_option("--fg-prompt", edit_fg, "new foreground prompt");
    auto* bg_opt = edit_cmd->add_option("--bg-prompt", edit_bg, "new background prompt");
    fg_opt->excludes(bg_opt);
    edit_cmd->add_option("--out", edit_out, "output directory")->required();

    // eval
    std::string eval_masks, eval_plan, eval_out;
    int eval_sigma = 32;
    auto* eval_cmd = app.add_subcommand("eval", "score mask sequences against a plan");
    eval_cmd->add_option("--masks", eval_masks, "directory with mask_<char>_%03d.png")->required();
    eval_cmd->add_option("--plan", eval_plan, "plan JSON")->required();
    eval_cmd->add_option("--sigma", eval_sigma, "motionless tolerance is sigma/2 mask pixels")
        ->capture_default_str();
    eval_cmd->add_option("--out", eval_out, "report path (stdout when omitted)");

    // skeleton
    CommonFlags skel_flags;
    std::string skel_prompt, skel_out;
    auto* skel_cmd = app.add_subcommand("skeleton", "render a 10-node stick-figure video");
    skel_flags.attach(*skel_cmd);
    skel_cmd->add_option("--prompt", skel_prompt, "text prompt")->required();
    skel_cmd->add_option("--out", skel_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*plan_cmd) {
            const mw::PipelineConfig config = plan_flags.resolve();
            mw::Backends backends = mw::make_backends(config);
            const auto first = mw::generate_first_frame(plan_prompt, config.seed, *backends.denoiser,
                                                        config.schedule(), config.image_size);
            auto llm = mw::make_llm(config);
            mw::FallbackPlan planned = mw::make_plan(config, plan_prompt, first.image, backends.heading.get(),
                                                     parse_heading(plan_heading), llm.get());
            if (!plan_camera.empty()) planned.plan = mw::apply_camera_mode(planned.plan, plan_camera);
            for (const auto& w : planned.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
            const std::string text = plan_answer ? mw::format_motion_answer(planned.plan) : mw::plan_to_json(planned.plan);
            if (plan_out.empty()) {
                std::cout << text;
            } else {
                std::filesystem::create_directories(plan_out);
                mw::write_text(std::filesystem::path(plan_out) / "plan.json", mw::plan_to_json(planned.plan));
            }
            return 0;
        }

        if (*gen_cmd) {
            const mw::PipelineConfig config = gen_flags.resolve();
            mw::GenerateRequest request;
            request.prompt = gen_prompt;
            if (!gen_slices.empty()) request.slices = split_slices(gen_slices);
            if (request.prompt.empty() && request.slices.empty()) {
                throw mw::Error(mw::ErrorKind::Usage, "generate needs --prompt or --slices");
            }
            if (!gen_camera.empty()) request.camera = gen_camera;
            if (!gen_plan.empty()) request.plan = mw::plan_from_json(mw::read_text(gen_plan));
            request.heading = parse_heading(gen_heading);

            if (gen_seeds.empty()) {
                request.out_dir = gen_out;
                print_summary(mw::run_generation(config, request), request.out_dir);
                return 0;
            }
            const auto [lo, hi] = parse_seed_range(gen_seeds);
            const std::size_t n = static_cast<std::size_t>(hi - lo + 1);
            std::vector<std::optional<mw::RunResult>> results(n);
            std::vector<std::exception_ptr> errors(n);
            const std::size_t workers =
                std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
            {
                std::vector<std::jthread> pool;
                for (std::size_t w = 0; w < workers; ++w) {
                    pool.emplace_back([&, w] {
                        for (std::size_t i = w; i < n; i += workers) {
                            try {
                                mw::PipelineConfig c = config;
                                c.seed = lo + i;
                                mw::GenerateRequest req = request;
                                req.out_dir = std::filesystem::path(gen_out) / ("seed_" + std::to_string(c.seed));
                                results[i] = mw::run_generation(c, req);
                            } catch (...) {
                                errors[i] = std::current_exception();
                            }
                        }
                    });
                }
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (errors[i]) std::rethrow_exception(errors[i]);
                print_summary(*results[i], std::filesystem::path(gen_out) / ("seed_" + std::to_string(lo + i)));
            }
            return 0;
        }

        if (*edit_cmd) {
            if (edit_fg.empty() == edit_bg.empty()) {
                throw mw::Error(mw::ErrorKind::Usage, "edit needs exactly one of --fg-prompt or --bg-prompt");
            }
            mw::PipelineConfig overrides = edit_flags.resolve();
            mw::EditRequest request;
            request.base_dir = edit_base;
            request.target = edit_fg.empty() ? mw::EditTarget::Background : mw::EditTarget::Foreground;
            request.prompt = edit_fg.empty() ? edit_bg : edit_fg;
            request.out_dir = edit_out;
            const auto result = mw::run_edit(overrides, request);
            std::printf("%zu edited frames -> %s\n", result.frames.size(), edit_out.c_str());
            return 0;
        }

        if (*eval_cmd) {
            mw::EvalRequest request{eval_masks, eval_plan, eval_sigma};
            const std::string text = mw::emit_report(mw::run_eval(request));
            if (eval_out.empty()) {
                std::cout << text;
            } else {
                mw::write_text(eval_out, text);
            }
            return 0;
        }

        if (*skel_cmd) {
            const mw::PipelineConfig config = skel_flags.resolve();
            const auto result = mw::run_skeleton(config, skel_prompt, skel_out);
            std::printf("%zu skeleton frames -> %s\n", result.frames.size(), skel_out.c_str());
            return 0;
        }
    } catch (const mw::Error& e) {
        std::fprintf(stderr, "error [%s]: %s\n", mw::to_string(e.kind()), e.what());
        return exit_code(e);
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "error [schema]: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 1;
}
