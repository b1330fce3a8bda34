// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include "motionwarp/pipeline.hpp"

#include <cstdio>
#include <functional>
#include <thread>

#include <nlohmann/json.hpp>

#include "motionwarp/bridge.hpp"
#include "motionwarp/config.hpp"
#include "motionwarp/image_io.hpp"
#include "motionwarp/toy_backend.hpp"
#include "motionwarp/warp.hpp"
#include "motionwarp/wire.hpp"

namespace motionwarp {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

template <class F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(name, e);
    } catch (const nlohmann::json::exception& e) {
        throw StageError(name, Error(ErrorKind::Schema, e.what()));
    } catch (const fs::filesystem_error& e) {
        throw StageError(name, Error(ErrorKind::State, e.what()));
    }
}

std::string numbered(std::string_view stem, int k, std::string_view ext) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "_%03d", k);
    return std::string(stem) + buf + std::string(ext);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    {
        std::vector<std::jthread> workers;
        const std::size_t w_count = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
        for (std::size_t w = 0; w < w_count; ++w) {
            workers.emplace_back([&, w] {
                for (std::size_t i = w; i < n; i += w_count) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

// Writes into a sibling staging directory and swaps it in on success, so a
// failed run never leaves partial outputs behind.
class StagedDir {
public:
    explicit StagedDir(fs::path target) : m_target(std::move(target)) {
        const fs::path parent = m_target.has_parent_path() ? m_target.parent_path() : fs::path(".");
        m_staging = parent / ("." + m_target.filename().string() + ".partial");
        fs::remove_all(m_staging);
        fs::create_directories(m_staging);
    }
    ~StagedDir() {
        if (!m_committed) {
            std::error_code ec;
            fs::remove_all(m_staging, ec);
        }
    }
    StagedDir(const StagedDir&) = delete;
    StagedDir& operator=(const StagedDir&) = delete;

    const fs::path& path() const { return m_staging; }

    void commit() {
        fs::remove_all(m_target);
        fs::rename(m_staging, m_target);
        m_committed = true;
    }

private:
    fs::path m_target;
    fs::path m_staging;
    bool m_committed = false;
};

// Heading prior for the toy backend: the facing of the matching sprite.
class ToySceneHeading final : public HeadingProvider {
public:
    explicit ToySceneHeading(const toy::ToyBackend& backend) : m_backend(backend) {}

    Direction heading(const FrameImage& frame, std::string_view character) override {
        const toy::PlacedEntity* entity = m_backend.scene().find(character);
        ColorKeySegmenter seg;
        if (entity == nullptr || seg.segment(frame, character, 0.3).empty()) {
            throw Error(ErrorKind::NotFound, "'" + std::string(character) + "' is not visible in the first frame");
        }
        if (!entity->spec->facing) {
            throw Error(ErrorKind::NotFound, "'" + std::string(character) + "' has no obvious heading");
        }
        return *entity->spec->facing;
    }

private:
    const toy::ToyBackend& m_backend;
};

Lexicon load_lexicon(const PipelineConfig& config) {
    if (config.lexicon_path.empty()) {
        return default_lexicon();
    }
    return lexicon_from_json(read_text(config.lexicon_path));
}

std::optional<HeadingHint> heading_for(std::string_view name, const FrameImage& frame, HeadingProvider* source,
                                       const std::optional<Direction>& override_dir,
                                       std::vector<std::string>& warnings) {
    if (override_dir) {
        if (*override_dir == Direction::Motionless) {
            throw Error(ErrorKind::Usage, "a heading cannot be motionless");
        }
        return HeadingHint{std::string(name), *override_dir};
    }
    if (source == nullptr) {
        return std::nullopt;
    }
    try {
        return resolve_heading(frame, name, *source);
    } catch (const Error& e) {
        // An absent character or an unreachable provider degrades to a
        // prompt-only plan.
        if (e.kind() != ErrorKind::NotFound && e.kind() != ErrorKind::Backend) throw;
        warnings.push_back(std::string("heading: ") + e.what());
        return std::nullopt;
    }
}

std::vector<Mask> masks_of(const RunResult& r, std::size_t character) {
    std::vector<Mask> out;
    out.reserve(r.masks.size());
    for (const auto& frame : r.masks) out.push_back(frame[character]);
    return out;
}

std::vector<CharacterScore> score_characters(const std::vector<std::string>& names,
                                             const std::vector<std::vector<Direction>>& plans,
                                             const std::vector<std::vector<Mask>>& per_character, int sigma) {
    std::vector<CharacterScore> out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        CharacterScore score;
        score.name = names[i];
        score.plan = plans[i];
        try {
            score.trajectory = track_trajectory(per_character[i], names[i]);
            score.result = score_motion(score.trajectory, plans[i], sigma);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NotFound && e.kind() != ErrorKind::UndefinedMetric) throw;
            score.note = e.what();
        }
        out.push_back(std::move(score));
    }
    return out;
}

void write_latent(const fs::path& path, const LatentGrid& grid) { write_file(path, wire::encode_latent(grid)); }

LatentGrid read_latent(const fs::path& path) {
    if (!fs::exists(path)) {
        throw Error(ErrorKind::State, "missing artifact " + path.string());
    }
    return wire::decode_latent(read_file(path));
}

std::vector<LatentGrid> denoise_frames(std::span<const LatentGrid> at_t1, int first_frame, DenoiserBackend& backend,
                                       std::span<const std::string> conditions, const DiffusionSchedule& sched,
                                       const NoiseSource& noise, int threads) {
    std::vector<LatentGrid> settled =
        ddpm_settle(at_t1, sched.t1, sched.t2, backend, conditions, sched, noise, first_frame, threads);
    parallel_for(settled.size(), threads, [&](std::size_t i) {
        settled[i] = ddim_denoise(settled[i], sched.t2, 0, backend, conditions[i], sched, first_frame + static_cast<int>(i));
    });
    return settled;
}

std::vector<FrameImage> decode_frames(std::span<const LatentGrid> latents, DenoiserBackend& backend, int threads) {
    std::vector<FrameImage> out(latents.size());
    parallel_for(latents.size(), threads, [&](std::size_t i) { out[i] = backend.decode(latents[i]); });
    return out;
}

ordered_json run_manifest(const PipelineConfig& config, const RunResult& r, const GenerateRequest& req) {
    ordered_json doc;
    doc["prompts"] = r.prompts;
    doc["camera"] = req.camera ? ordered_json(*req.camera) : ordered_json(nullptr);
    doc["characters"] = r.characters;
    doc["config"] = config_to_json(config);
    return doc;
}

void write_masks(const fs::path& dir, const std::vector<std::string>& names,
                 const std::vector<std::vector<Mask>>& masks, int factor) {
    fs::create_directories(dir / "latents");
    for (std::size_t k = 0; k < masks.size(); ++k) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            const std::string stem = "mask_" + file_stem(names[i]);
            const Mask& m = masks[k][i];
            write_file(dir / numbered(stem, static_cast<int>(k), ".png"), encode_png(to_image_resolution(m, factor)));
            write_file(dir / "latents" / numbered(stem, static_cast<int>(k), ".png"), encode_png(m));
        }
    }
}

void write_run(const fs::path& out, const PipelineConfig& config, const RunResult& r, const GenerateRequest& req) {
    StagedDir staged(out);
    const fs::path& dir = staged.path();
    for (std::size_t k = 0; k < r.frames.size(); ++k) {
        write_file(dir / numbered("frame", static_cast<int>(k), ".png"), encode_png(r.frames[k]));
    }
    write_masks(dir, r.characters, r.masks, config.latent_factor);
    for (std::size_t k = 0; k < r.composed.size(); ++k) {
        write_latent(dir / "latents" / numbered("t1", static_cast<int>(k), ".bin"), r.composed[k]);
    }
    for (std::size_t k = 0; k < r.guides.size(); ++k) {
        write_latent(dir / "latents" / numbered("guide", static_cast<int>(k), ".bin"), r.guides[k]);
    }
    write_text(dir / "plan.json", plan_to_json(r.plan));
    write_text(dir / "report.json", emit_report(r.report));
    write_text(dir / "run.json", run_manifest(config, r, req).dump(2) + "\n");
    staged.commit();
}

std::vector<std::string> conditions_for(const SliceSchedule& slices, int from, int to) {
    std::vector<std::string> out;
    for (int k = from; k < to; ++k) out.push_back(slices.slice_of(k).prompt);
    return out;
}

}  // namespace

std::string file_stem(std::string_view name) {
    std::string out;
    for (char c : name) {
        const auto u = static_cast<unsigned char>(c);
        out.push_back(std::isalnum(u) ? static_cast<char>(std::tolower(u)) : '_');
    }
    return out.empty() ? std::string("unnamed") : out;
}

Backends make_backends(const PipelineConfig& config) {
    Backends b;
    const DiffusionSchedule sched = config.schedule();
    if (config.backend == BackendKind::Toy) {
        auto toy_backend = std::make_unique<toy::ToyBackend>(sched, config.latent_factor, config.attention_mix,
                                                             config.attention_patch);
        b.toy = toy_backend.get();
        b.heading = std::make_unique<ToySceneHeading>(*toy_backend);
        b.denoiser = std::move(toy_backend);
        b.segmenter = std::make_unique<ColorKeySegmenter>();
    } else {
        auto client = std::make_shared<BridgeClient>(config.bridge_url);
        auto backend = std::make_unique<BridgeBackend>(client);
        backend->check_schedule(sched);
        b.denoiser = std::move(backend);
        b.segmenter = std::make_unique<BridgeSegmenter>(client);
        b.heading = std::make_unique<BridgeHeadingProvider>(client);
    }
    return b;
}

std::unique_ptr<LlmProvider> make_llm(const PipelineConfig& config) {
    switch (config.llm) {
    case LlmMode::Fallback:
        return nullptr;
    case LlmMode::Replay:
        if (config.llm_replay_dir.empty()) {
            throw Error(ErrorKind::Usage, "--llm replay needs a transcript directory (--llm-replay DIR)");
        }
        return std::make_unique<ReplayProvider>(config.llm_replay_dir);
    case LlmMode::Http:
        return std::make_unique<HttpChatProvider>(config.llm_url, config.llm_model);
    }
    return nullptr;
}

FallbackPlan make_plan(const PipelineConfig& config, std::string_view prompt, const FrameImage& first_frame,
                       HeadingProvider* heading_source, const std::optional<Direction>& heading_override,
                       LlmProvider* llm) {
    const int F = config.frame_count;
    FallbackPlan out;
    if (llm != nullptr) {
        const auto objects =
            parse_moving_objects(llm->complete(build_prompt(PromptKind::MovingObjects, prompt, std::nullopt, F)));
        std::optional<HeadingHint> hint;
        if (!objects.empty()) {
            hint = heading_for(objects.front(), first_frame, heading_source, heading_override, out.warnings);
        }
        out.plan = plan_with_llm(*llm, prompt, hint, F);
        return out;
    }

    const Lexicon lexicon = load_lexicon(config);
    const FallbackPlan draft = fallback_plan(prompt, F, lexicon);
    std::vector<HeadingHint> hints;
    for (std::size_t i = 0; i < draft.plan.characters.size(); ++i) {
        const auto& name = draft.plan.characters[i].name;
        const std::optional<Direction> forced = i == 0 ? heading_override : std::nullopt;
        const bool needed = std::find(draft.needs_heading.begin(), draft.needs_heading.end(), name) !=
                            draft.needs_heading.end();
        if (!needed && !forced) {
            continue;
        }
        if (auto hint = heading_for(name, first_frame, heading_source, forced, out.warnings)) {
            hints.push_back(*hint);
        }
    }
    FallbackPlan final_plan = fallback_plan(prompt, F, lexicon, hints);
    final_plan.warnings.insert(final_plan.warnings.begin(), out.warnings.begin(), out.warnings.end());
    return final_plan;
}

RunResult run_generation(const PipelineConfig& config, const GenerateRequest& request) {
    stage("config", [&] { config.validate(); });
    Backends backends = stage("backend", [&] { return make_backends(config); });
    return run_generation(config, request, backends);
}

RunResult run_generation(const PipelineConfig& config, const GenerateRequest& request, Backends& backends) {
    stage("config", [&] { config.validate(); });
    RunResult r;
    const int F = config.frame_count;
    const DiffusionSchedule sched = config.schedule();
    r.prompts = request.slices.empty() ? std::vector<std::string>{request.prompt} : request.slices;
    for (const auto& p : r.prompts) {
        if (p.find_first_not_of(" \t\n") == std::string::npos) {
            throw StageError("config", Error(ErrorKind::Usage, "prompt is empty"));
        }
    }
    r.slices = stage("slices", [&] { return slice_schedule(r.prompts, F); });

    DenoiserBackend& denoiser = *backends.denoiser;
    r.first = stage("first_frame",
                    [&] { return generate_first_frame(r.prompts[0], config.seed, denoiser, sched, config.image_size); });

    r.plan = stage("plan", [&] {
        if (request.plan) {
            request.plan->validate();
            if (request.plan->frame_count != F) {
                throw Error(ErrorKind::Schema, "plan covers " + std::to_string(request.plan->frame_count) +
                                                   " frames, run has " + std::to_string(F));
            }
            MotionPlan plan = *request.plan;
            return request.camera ? apply_camera_mode(plan, *request.camera) : plan;
        }
        auto llm = make_llm(config);
        MotionPlan merged;
        merged.frame_count = F;
        for (std::size_t s = 0; s < r.prompts.size(); ++s) {
            FallbackPlan part = make_plan(config, r.prompts[s], r.first.image, backends.heading.get(),
                                          request.heading, llm.get());
            r.warnings.insert(r.warnings.end(), part.warnings.begin(), part.warnings.end());
            if (r.prompts.size() == 1) {
                merged = std::move(part.plan);
                break;
            }
            const Slice& slice = r.slices.slices[s];
            for (const auto& ch : part.plan.characters) {
                auto it = std::find_if(merged.characters.begin(), merged.characters.end(),
                                       [&](const CharacterPlan& c) { return c.name == ch.name; });
                if (it == merged.characters.end()) {
                    CharacterPlan fresh{ch.name, ch.phrase,
                                        std::vector<Direction>(static_cast<std::size_t>(F - 1), Direction::Motionless)};
                    merged.characters.push_back(std::move(fresh));
                    it = std::prev(merged.characters.end());
                }
                // Transition j moves into frame j + 1, which belongs to one slice.
                for (int j = std::max(slice.start - 1, 0); j < slice.end - 1; ++j) {
                    it->directions[static_cast<std::size_t>(j)] = ch.directions[static_cast<std::size_t>(j)];
                }
            }
        }
        merged.validate();
        return request.camera ? apply_camera_mode(merged, *request.camera) : merged;
    });

    // Segment each character in the first frame; characters that cannot be
    // found are dropped with a warning.
    std::vector<std::vector<Direction>> directions;
    stage("segment", [&] {
        const int lw = r.first.latent_t1.width();
        const int lh = r.first.latent_t1.height();
        std::vector<Mask> initial;
        std::optional<std::size_t> scene_slot;
        for (const auto& ch : r.plan.characters) {
            if (ch.name == kBackgroundSceneName) {
                scene_slot = initial.size();
                initial.emplace_back(lw, lh, Resolution::Latent);
                r.characters.push_back(ch.name);
                directions.push_back(ch.directions);
                continue;
            }
            const Mask image_mask =
                segment(SegmentationRequest{r.first.image, ch.phrase, config.segmentation_confidence}, *backends.segmenter);
            Mask latent_mask = to_latent_resolution(image_mask, config.latent_factor);
            if (latent_mask.width() != lw || latent_mask.height() != lh) {
                throw Error(ErrorKind::Shape, "mask of '" + ch.name + "' does not match the latent grid");
            }
            if (latent_mask.empty()) {
                r.warnings.push_back("'" + ch.name + "' was not found in the first frame and is left out");
                continue;
            }
            initial.push_back(std::move(latent_mask));
            r.characters.push_back(ch.name);
            directions.push_back(ch.directions);
        }
        if (scene_slot) {
            Mask others(lw, lh, Resolution::Latent);
            for (std::size_t i = 0; i < initial.size(); ++i) {
                if (i != *scene_slot) others = others | initial[i];
            }
            initial[*scene_slot] = ~others;
        }
        if (r.characters.empty()) {
            r.warnings.push_back("no character could be segmented; frames repeat the first frame");
        }
        r.masks.push_back(std::move(initial));
    });

    stage("warp", [&] {
        const LatentGrid& base = r.first.latent_t1;
        r.composed = replicate_initial_latents(base, F);
        std::optional<LatentGrid> guide0;
        if (backends.toy != nullptr) {
            guide0 = backends.toy->guides().at(0);
            r.guides.assign(static_cast<std::size_t>(F), *guide0);
        }
        for (int k = 1; k < F; ++k) {
            std::vector<Delta> deltas;
            for (const auto& dirs : directions) {
                deltas.push_back(direction_to_delta(dirs[static_cast<std::size_t>(k - 1)], config.sigma));
            }
            const auto& prev_masks = r.masks.back();
            Composition comp = compose_next_frame(r.composed[static_cast<std::size_t>(k - 1)], prev_masks, deltas, base);
            if (guide0) {
                r.guides[static_cast<std::size_t>(k)] =
                    compose_next_frame(r.guides[static_cast<std::size_t>(k - 1)], prev_masks, deltas, *guide0).latent;
            }
            for (std::size_t i = 0; i < comp.exited.size(); ++i) {
                if (comp.exited[i]) {
                    r.warnings.push_back("'" + r.characters[i] + "' left the frame at frame " + std::to_string(k));
                }
            }
            r.composed[static_cast<std::size_t>(k)] = std::move(comp.latent);
            r.masks.push_back(std::move(comp.masks));
        }
    });

    stage("anchors", [&] {
        r.anchors = anchor_schedule(r.slices, r.masks, config.gamma);
        if (backends.toy != nullptr) {
            backends.toy->set_guides(r.guides);
        }
        denoiser.set_anchors(r.anchors);
    });

    stage("denoise", [&] {
        const NoiseSource noise(config.seed);
        const auto conditions = conditions_for(r.slices, 1, F);
        std::vector<LatentGrid> rest = denoise_frames(std::span(r.composed).subspan(1), 1, denoiser, conditions,
                                                      sched, noise, config.threads);
        r.latents.push_back(r.first.latent);
        r.latents.insert(r.latents.end(), std::make_move_iterator(rest.begin()), std::make_move_iterator(rest.end()));
    });

    stage("decode", [&] {
        std::vector<FrameImage> rest = decode_frames(std::span(r.latents).subspan(1), denoiser, config.threads);
        r.frames.push_back(r.first.image);
        r.frames.insert(r.frames.end(), std::make_move_iterator(rest.begin()), std::make_move_iterator(rest.end()));
    });

    stage("evaluate", [&] {
        std::vector<std::vector<Mask>> per_character;
        for (std::size_t i = 0; i < r.characters.size(); ++i) per_character.push_back(masks_of(r, i));
        r.report.prompt = r.prompts.size() == 1 ? r.prompts[0] : "";
        r.report.config = config;
        r.report.characters = score_characters(r.characters, directions, per_character, config.sigma);
        r.report.anchors = r.anchors;
        r.report.slices = r.slices.slices;
        r.report.warnings = r.warnings;
    });

    if (!request.out_dir.empty()) {
        stage("write", [&] { write_run(request.out_dir, config, r, request); });
    }
    return r;
}

// ---------------------------------------------------------------------------

EditResult run_edit(const PipelineConfig& overrides, const EditRequest& request) {
    const fs::path& base = request.base_dir;
    const ordered_json manifest = stage("load", [&] {
        if (!fs::exists(base / "run.json")) {
            throw Error(ErrorKind::State, "no base run at '" + base.string() + "' (run.json missing)");
        }
        return ordered_json::parse(read_text(base / "run.json"));
    });
    if (request.prompt.find_first_not_of(" \t\n") == std::string::npos) {
        throw StageError("config", Error(ErrorKind::Usage, "edit prompt is empty"));
    }

    PipelineConfig config = stage("load", [&] {
        PipelineConfig c = config_from_json(manifest.at("config"), overrides);
        // Execution knobs may differ from the base run.
        c.threads = overrides.threads;
        c.backend = overrides.backend;
        c.bridge_url = overrides.bridge_url;
        c.validate();
        return c;
    });
    const int F = config.frame_count;
    const DiffusionSchedule sched = config.schedule();
    const auto prompts = manifest.at("prompts").get<std::vector<std::string>>();
    const auto characters = manifest.at("characters").get<std::vector<std::string>>();
    const MotionPlan plan = stage("load", [&] { return plan_from_json(read_text(base / "plan.json")); });

    std::vector<LatentGrid> base_t1;
    std::vector<LatentGrid> base_guides;
    std::vector<std::vector<Mask>> masks(static_cast<std::size_t>(F));
    std::vector<std::vector<Direction>> directions;
    EditResult out;
    stage("load", [&] {
        for (int k = 0; k < F; ++k) {
            base_t1.push_back(read_latent(base / "latents" / numbered("t1", k, ".bin")));
            if (fs::exists(base / "latents" / numbered("guide", k, ".bin"))) {
                base_guides.push_back(read_latent(base / "latents" / numbered("guide", k, ".bin")));
            }
        }
        for (const auto& name : characters) {
            const CharacterPlan* ch = plan.find(name);
            if (ch == nullptr) {
                throw Error(ErrorKind::State, "character '" + name + "' is missing from plan.json");
            }
            directions.push_back(ch->directions);
            for (int k = 0; k < F; ++k) {
                const fs::path p = base / "latents" / numbered("mask_" + file_stem(name), k, ".png");
                if (!fs::exists(p)) {
                    throw Error(ErrorKind::State, "missing artifact " + p.string());
                }
                masks[static_cast<std::size_t>(k)].push_back(decode_png_mask(read_file(p), Resolution::Latent));
            }
        }
        for (int k = 0; k < F; ++k) {
            Mask fg(base_t1[0].width(), base_t1[0].height(), Resolution::Latent);
            for (std::size_t i = 0; i < characters.size(); ++i) {
                if (characters[i] != kBackgroundSceneName) fg = fg | masks[static_cast<std::size_t>(k)][i];
            }
            out.foreground.push_back(std::move(fg));
        }
    });

    Backends backends = stage("backend", [&] { return make_backends(config); });
    DenoiserBackend& denoiser = *backends.denoiser;
    if (backends.toy != nullptr) {
        backends.toy->set_allow_empty_scene(request.target == EditTarget::Background);
    }
    const FirstFrame fresh = stage("first_frame", [&] {
        return generate_first_frame(request.prompt, config.seed, denoiser, sched, config.image_size);
    });

    stage("fuse", [&] {
        const bool toy_guides = backends.toy != nullptr;
        if (toy_guides && base_guides.size() != static_cast<std::size_t>(F)) {
            throw Error(ErrorKind::State, "base run has no toy guides; rerun generate with the toy backend");
        }
        const LatentGrid fresh_guide = toy_guides ? backends.toy->guides().at(0) : LatentGrid{};
        std::vector<LatentGrid> fused_guides;
        if (request.target == EditTarget::Background) {
            // The background is pinned to the first frame: no warping.
            for (int k = 0; k < F; ++k) {
                const auto ku = static_cast<std::size_t>(k);
                out.fused.push_back(fuse_foreground_background(base_t1[ku], fresh.latent_t1, out.foreground[ku]));
                if (toy_guides) {
                    fused_guides.push_back(fuse_foreground_background(base_guides[ku], fresh_guide, out.foreground[ku]));
                }
            }
        } else {
            LatentGrid fg = fresh.latent_t1;
            LatentGrid fg_guide = fresh_guide;
            for (int k = 0; k < F; ++k) {
                const auto ku = static_cast<std::size_t>(k);
                if (k > 0) {
                    std::vector<Delta> deltas;
                    for (const auto& dirs : directions) {
                        deltas.push_back(direction_to_delta(dirs[ku - 1], config.sigma));
                    }
                    fg = compose_next_frame(fg, masks[ku - 1], deltas, fresh.latent_t1).latent;
                    if (toy_guides) {
                        fg_guide = compose_next_frame(fg_guide, masks[ku - 1], deltas, fresh_guide).latent;
                    }
                }
                out.fused.push_back(fuse_foreground_background(fg, base_t1[ku], out.foreground[ku]));
                if (toy_guides) {
                    fused_guides.push_back(fuse_foreground_background(fg_guide, base_guides[ku], out.foreground[ku]));
                }
            }
        }
        if (toy_guides) {
            backends.toy->set_guides(fused_guides);
        }
    });

    const SliceSchedule slices = stage("anchors", [&] {
        SliceSchedule s = slice_schedule(prompts, F);
        denoiser.set_anchors(anchor_schedule(s, masks, config.gamma));
        return s;
    });

    stage("denoise", [&] {
        const NoiseSource noise(config.seed);
        const auto conditions = conditions_for(slices, 1, F);
        out.latents.push_back(ddim_denoise(out.fused[0], sched.t1, 0, denoiser, slices.slice_of(0).prompt, sched, 0));
        auto rest = denoise_frames(std::span(out.fused).subspan(1), 1, denoiser, conditions, sched, noise,
                                   config.threads);
        out.latents.insert(out.latents.end(), std::make_move_iterator(rest.begin()), std::make_move_iterator(rest.end()));
    });

    out.frames = stage("decode", [&] { return decode_frames(out.latents, denoiser, config.threads); });

    if (!request.out_dir.empty()) {
        stage("write", [&] {
            StagedDir staged(request.out_dir);
            const fs::path& dir = staged.path();
            write_masks(dir, characters, masks, config.latent_factor);
            for (int k = 0; k < F; ++k) {
                const auto ku = static_cast<std::size_t>(k);
                write_file(dir / numbered("frame", k, ".png"), encode_png(out.frames[ku]));
                write_latent(dir / "latents" / numbered("t1", k, ".bin"), out.fused[ku]);
            }
            write_text(dir / "plan.json", plan_to_json(plan));
            ordered_json doc;
            doc["base"] = base.string();
            doc["target"] = request.target == EditTarget::Background ? "background" : "foreground";
            doc["prompt"] = request.prompt;
            doc["prompts"] = prompts;
            doc["characters"] = characters;
            doc["config"] = config_to_json(config);
            write_text(dir / "edit.json", doc.dump(2) + "\n");
            staged.commit();
        });
    }
    return out;
}

// ---------------------------------------------------------------------------

RunReport run_eval(const EvalRequest& request) {
    const MotionPlan plan = stage("load", [&] { return plan_from_json(read_text(request.plan_path)); });
    std::vector<std::string> names;
    std::vector<std::vector<Direction>> directions;
    std::vector<std::vector<Mask>> per_character;
    RunReport report;
    stage("load", [&] {
        if (!fs::is_directory(request.mask_dir)) {
            throw Error(ErrorKind::NotFound, "mask directory '" + request.mask_dir.string() + "' does not exist");
        }
        for (const auto& ch : plan.characters) {
            const std::string stem = "mask_" + file_stem(ch.name);
            std::vector<Mask> seq;
            int missing = 0;
            for (int k = 0; k < plan.frame_count; ++k) {
                const fs::path p = request.mask_dir / numbered(stem, k, ".png");
                if (!fs::exists(p)) {
                    ++missing;
                    continue;
                }
                seq.push_back(decode_png_mask(read_file(p), Resolution::Image));
            }
            if (missing == plan.frame_count) {
                report.warnings.push_back("no masks for '" + ch.name + "'");
                continue;
            }
            if (missing > 0) {
                throw Error(ErrorKind::NotFound, std::to_string(missing) + " mask frame(s) missing for '" + ch.name + "'");
            }
            names.push_back(ch.name);
            directions.push_back(ch.directions);
            per_character.push_back(std::move(seq));
        }
    });
    report.characters =
        stage("evaluate", [&] { return score_characters(names, directions, per_character, request.sigma); });
    return report;
}

// ---------------------------------------------------------------------------

SkeletonResult run_skeleton(const PipelineConfig& config, std::string_view prompt, const fs::path& out_dir) {
    stage("config", [&] { config.validate(); });
    SkeletonResult r;
    const int F = config.frame_count;
    r.plan = stage("plan", [&] {
        auto llm = make_llm(config);
        if (!llm) {
            return fallback_skeleton_plan(prompt, F);
        }
        const std::string query = build_prompt(PromptKind::Skeleton, prompt, std::nullopt, F);
        std::optional<Error> last;
        for (int attempt = 0; attempt < 3; ++attempt) {
            try {
                return parse_skeleton_plan(llm->complete(query), F);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::Backend || e.kind() == ErrorKind::NotFound) throw;
                last = e;
            }
        }
        throw *last;
    });
    const int sigma_px = config.sigma * config.latent_factor;
    r.poses = stage("integrate",
                    [&] { return integrate_skeleton(r.plan, default_pose(config.image_size), sigma_px, config.image_size); });
    r.frames = stage("render", [&] { return render_skeleton_frames(r.poses, config.image_size); });

    if (!out_dir.empty()) {
        stage("write", [&] {
            StagedDir staged(out_dir);
            const fs::path& dir = staged.path();
            for (std::size_t k = 0; k < r.frames.size(); ++k) {
                write_file(dir / numbered("skeleton", static_cast<int>(k), ".png"), encode_png(r.frames[k]));
            }
            write_text(dir / "poses.json", poses_to_json(r.poses));
            ordered_json plan_doc;
            plan_doc["frames"] = F;
            ordered_json nodes;
            for (std::size_t n = 0; n < kSkeletonNodes.size(); ++n) {
                ordered_json dirs = ordered_json::array();
                for (Direction d : r.plan.nodes[n]) dirs.push_back(std::string(to_string(d)));
                nodes[std::string(kSkeletonNodes[n])] = dirs;
            }
            plan_doc["nodes"] = nodes;
            write_text(dir / "skeleton_plan.json", plan_doc.dump(2) + "\n");
            staged.commit();
        });
    }
    return r;
}

}  // namespace motionwarp
