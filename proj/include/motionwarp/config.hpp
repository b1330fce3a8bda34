// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include <nlohmann/json.hpp>

#include "motionwarp/core.hpp"

namespace motionwarp {

BackendKind parse_backend_kind(std::string_view text);
LlmMode parse_llm_mode(std::string_view text);

nlohmann::ordered_json config_to_json(const PipelineConfig& config);

/// Overlays the keys present in `doc` onto `base`. Unknown keys are a
/// Schema error so typos do not pass silently.
PipelineConfig config_from_json(const nlohmann::json& doc, PipelineConfig base = {});

}  // namespace motionwarp
