// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include "motionwarp/config.hpp"

namespace motionwarp {

BackendKind parse_backend_kind(std::string_view text) {
    if (text == "toy") return BackendKind::Toy;
    if (text == "bridge") return BackendKind::Bridge;
    throw Error(ErrorKind::Usage, "unknown backend '" + std::string(text) + "' (toy|bridge)");
}

LlmMode parse_llm_mode(std::string_view text) {
    if (text == "fallback") return LlmMode::Fallback;
    if (text == "replay") return LlmMode::Replay;
    if (text == "http") return LlmMode::Http;
    throw Error(ErrorKind::Usage, "unknown llm mode '" + std::string(text) + "' (replay|http|fallback)");
}

nlohmann::ordered_json config_to_json(const PipelineConfig& c) {
    return {
        {"frames", c.frame_count},
        {"size", c.image_size},
        {"latent_factor", c.latent_factor},
        {"sigma", c.sigma},
        {"gamma", c.gamma},
        {"seed", c.seed},
        {"backend", to_string(c.backend)},
        {"bridge_url", c.bridge_url},
        {"llm", to_string(c.llm)},
        {"llm_url", c.llm_url},
        {"llm_model", c.llm_model},
        {"llm_replay_dir", c.llm_replay_dir},
        {"lexicon", c.lexicon_path},
        {"segmentation_confidence", c.segmentation_confidence},
        {"attention_mix", c.attention_mix},
        {"attention_patch", c.attention_patch},
        {"threads", c.threads},
        {"T", c.T},
        {"beta_start", c.beta_start},
        {"beta_end", c.beta_end},
        {"t1_frac", c.t1_frac},
        {"t2_frac", c.t2_frac},
    };
}

PipelineConfig config_from_json(const nlohmann::json& doc, PipelineConfig c) {
    if (!doc.is_object()) {
        throw Error(ErrorKind::Schema, "config must be a JSON object");
    }
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "frames") c.frame_count = value.get<int>();
            else if (key == "size") c.image_size = value.get<int>();
            else if (key == "latent_factor") c.latent_factor = value.get<int>();
            else if (key == "sigma") c.sigma = value.get<int>();
            else if (key == "gamma") c.gamma = value.get<double>();
            else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else if (key == "backend") c.backend = parse_backend_kind(value.get<std::string>());
            else if (key == "bridge_url") c.bridge_url = value.get<std::string>();
            else if (key == "llm") c.llm = parse_llm_mode(value.get<std::string>());
            else if (key == "llm_url") c.llm_url = value.get<std::string>();
            else if (key == "llm_model") c.llm_model = value.get<std::string>();
            else if (key == "llm_replay_dir") c.llm_replay_dir = value.get<std::string>();
            else if (key == "lexicon") c.lexicon_path = value.get<std::string>();
            else if (key == "segmentation_confidence") c.segmentation_confidence = value.get<double>();
            else if (key == "attention_mix") c.attention_mix = value.get<double>();
            else if (key == "attention_patch") c.attention_patch = value.get<int>();
            else if (key == "threads") c.threads = value.get<int>();
            else if (key == "T") c.T = value.get<int>();
            else if (key == "beta_start") c.beta_start = value.get<double>();
            else if (key == "beta_end") c.beta_end = value.get<double>();
            else if (key == "t1_frac") c.t1_frac = value.get<double>();
            else if (key == "t2_frac") c.t2_frac = value.get<double>();
            else throw Error(ErrorKind::Schema, "unknown config key '" + key + "'");
        }
    } catch (const nlohmann::json::type_error& e) {
        throw Error(ErrorKind::Schema, std::string("config value has the wrong type: ") + e.what());
    }
    return c;
}

}  // namespace motionwarp
