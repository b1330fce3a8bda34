// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include "motionwarp/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

namespace motionwarp {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Vocabulary: return "vocabulary";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Range: return "range";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::NotFound: return "not_found";
    case ErrorKind::EmptyMask: return "empty_mask";
    case ErrorKind::Backend: return "backend";
    case ErrorKind::State: return "state";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::SceneCompile: return "scene_compile";
    case ErrorKind::UndefinedMetric: return "undefined_metric";
    case ErrorKind::Precondition: return "precondition";
    }
    return "unknown";
}

namespace {

struct DirectionInfo {
    Direction direction;
    std::string_view label;
    std::string_view spoken;
    int ux;
    int uy;
};

constexpr std::array<DirectionInfo, 9> kDirectionTable = {{
    {Direction::Motionless, "motionless", "motionless", 0, 0},
    {Direction::Left, "left", "left", -1, 0},
    {Direction::Right, "right", "right", 1, 0},
    {Direction::Up, "up", "up", 0, -1},
    {Direction::Down, "down", "down", 0, 1},
    {Direction::LeftUp, "left_up", "left up", -1, -1},
    {Direction::LeftDown, "left_down", "left down", -1, 1},
    {Direction::RightUp, "right_up", "right up", 1, -1},
    {Direction::RightDown, "right_down", "right down", 1, 1},
}};

const DirectionInfo& info(Direction d) {
    return kDirectionTable[static_cast<std::size_t>(d)];
}

// Lowercase, map '_' and '-' to spaces, collapse whitespace, trim.
std::string normalize_words(std::string_view text) {
    std::string out;
    bool pending_space = false;
    for (char raw : text) {
        auto c = static_cast<unsigned char>(raw);
        if (std::isspace(c) || raw == '_' || raw == '-') {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

}  // namespace

std::string_view to_string(Direction d) { return info(d).label; }
std::string_view to_spoken(Direction d) { return info(d).spoken; }

Direction parse_direction(std::string_view label) {
    for (const auto& entry : kDirectionTable) {
        if (entry.label == label) {
            return entry.direction;
        }
    }
    throw VocabularyError(std::string(label));
}

std::optional<Direction> match_direction(std::string_view text) {
    const std::string norm = normalize_words(text);
    for (const auto& entry : kDirectionTable) {
        if (entry.spoken == norm) {
            return entry.direction;
        }
    }
    // "down right" -> "right down"
    const auto space = norm.find(' ');
    if (space != std::string::npos && norm.find(' ', space + 1) == std::string::npos) {
        const std::string swapped = norm.substr(space + 1) + " " + norm.substr(0, space);
        for (const auto& entry : kDirectionTable) {
            if (entry.spoken == swapped) {
                return entry.direction;
            }
        }
    }
    return std::nullopt;
}

Direction opposite(Direction d) {
    const auto& src = info(d);
    for (const auto& entry : kDirectionTable) {
        if (entry.ux == -src.ux && entry.uy == -src.uy) {
            return entry.direction;
        }
    }
    return Direction::Motionless;
}

Delta direction_to_delta(Direction d, int sigma) {
    if (sigma < 1) {
        throw Error(ErrorKind::Precondition, "sigma must be >= 1");
    }
    const auto& entry = info(d);
    return {entry.ux * sigma, entry.uy * sigma};
}

// ---------------------------------------------------------------------------

bool CharacterPlan::is_motionless() const {
    return std::all_of(directions.begin(), directions.end(),
                       [](Direction d) { return d == Direction::Motionless; });
}

void MotionPlan::validate() const {
    if (frame_count < 2) {
        throw Error(ErrorKind::Schema, "plan frame_count must be >= 2");
    }
    std::set<std::string> seen;
    for (const auto& ch : characters) {
        if (ch.name.empty()) {
            throw Error(ErrorKind::Schema, "character name is empty");
        }
        if (ch.name == kBackgroundName) {
            throw Error(ErrorKind::Schema, "background must not be listed as a character");
        }
        if (!seen.insert(ch.name).second) {
            throw Error(ErrorKind::Schema, "duplicate character '" + ch.name + "'");
        }
        if (static_cast<int>(ch.directions.size()) != frame_count - 1) {
            throw Error(ErrorKind::Schema,
                        "character '" + ch.name + "' has " + std::to_string(ch.directions.size()) +
                            " directions, expected " + std::to_string(frame_count - 1));
        }
    }
}

const CharacterPlan* MotionPlan::find(std::string_view name) const {
    for (const auto& ch : characters) {
        if (ch.name == name) {
            return &ch;
        }
    }
    return nullptr;
}

std::string plan_to_json(const MotionPlan& plan) {
    nlohmann::ordered_json doc;
    doc["frame_count"] = plan.frame_count;
    doc["characters"] = nlohmann::ordered_json::array();
    for (const auto& ch : plan.characters) {
        nlohmann::ordered_json entry;
        entry["name"] = ch.name;
        entry["phrase"] = ch.phrase;
        auto dirs = nlohmann::ordered_json::array();
        for (Direction d : ch.directions) {
            dirs.push_back(std::string(to_string(d)));
        }
        entry["directions"] = std::move(dirs);
        doc["characters"].push_back(std::move(entry));
    }
    return doc.dump(2);
}

MotionPlan plan_from_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.byte, "invalid plan JSON");
    }
    MotionPlan plan;
    try {
        plan.frame_count = doc.at("frame_count").get<int>();
        for (const auto& entry : doc.at("characters")) {
            CharacterPlan ch;
            ch.name = entry.at("name").get<std::string>();
            ch.phrase = entry.value("phrase", ch.name);
            for (const auto& d : entry.at("directions")) {
                ch.directions.push_back(parse_direction(d.get<std::string>()));
            }
            plan.characters.push_back(std::move(ch));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Schema, std::string("plan JSON: ") + e.what());
    }
    plan.validate();
    return plan;
}

// ---------------------------------------------------------------------------

Mask::Mask(int width, int height, Resolution resolution)
    : m_width(width), m_height(height), m_resolution(resolution) {
    if (width < 0 || height < 0) {
        throw Error(ErrorKind::Shape, "negative mask dimensions");
    }
    m_cells.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

bool Mask::get_or_false(int x, int y) const {
    if (x < 0 || y < 0 || x >= m_width || y >= m_height) {
        return false;
    }
    return at(x, y);
}

std::size_t Mask::count() const {
    return static_cast<std::size_t>(std::count(m_cells.begin(), m_cells.end(), std::uint8_t{1}));
}

Mask Mask::operator|(const Mask& other) const {
    if (!same_shape(other)) {
        throw Error(ErrorKind::Shape, "mask union of mismatched shapes");
    }
    Mask out = *this;
    for (std::size_t i = 0; i < m_cells.size(); ++i) {
        out.m_cells[i] = static_cast<std::uint8_t>(m_cells[i] | other.m_cells[i]);
    }
    return out;
}

Mask Mask::operator&(const Mask& other) const {
    if (!same_shape(other)) {
        throw Error(ErrorKind::Shape, "mask intersection of mismatched shapes");
    }
    Mask out = *this;
    for (std::size_t i = 0; i < m_cells.size(); ++i) {
        out.m_cells[i] = static_cast<std::uint8_t>(m_cells[i] & other.m_cells[i]);
    }
    return out;
}

Mask Mask::operator~() const {
    Mask out = *this;
    for (auto& c : out.m_cells) {
        c = static_cast<std::uint8_t>(c ^ 1U);
    }
    return out;
}

LatentGrid::LatentGrid(int channels, int height, int width, float fill)
    : m_channels(channels), m_height(height), m_width(width) {
    if (channels < 0 || height < 0 || width < 0) {
        throw Error(ErrorKind::Shape, "negative latent dimensions");
    }
    m_values.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

bool LatentGrid::all_finite() const {
    return std::all_of(m_values.begin(), m_values.end(), [](float v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------

DiffusionSchedule DiffusionSchedule::from_betas(std::vector<double> betas, int t1, int t2) {
    DiffusionSchedule s;
    s.T = static_cast<int>(betas.size());
    s.betas = std::move(betas);
    s.t1 = t1;
    s.t2 = t2;
    s.alpha_bars.resize(static_cast<std::size_t>(s.T) + 1);
    s.alpha_bars[0] = 1.0;
    for (int t = 1; t <= s.T; ++t) {
        s.alpha_bars[static_cast<std::size_t>(t)] =
            s.alpha_bars[static_cast<std::size_t>(t - 1)] * (1.0 - s.betas[static_cast<std::size_t>(t - 1)]);
    }
    s.validate();
    return s;
}

DiffusionSchedule DiffusionSchedule::linear(int T, double beta_start, double beta_end,
                                            double t1_frac, double t2_frac) {
    if (T < 2) {
        throw Error(ErrorKind::Precondition, "schedule needs T >= 2");
    }
    std::vector<double> betas(static_cast<std::size_t>(T));
    for (int i = 0; i < T; ++i) {
        betas[static_cast<std::size_t>(i)] =
            beta_start + (beta_end - beta_start) * static_cast<double>(i) / static_cast<double>(T - 1);
    }
    return from_betas(std::move(betas), static_cast<int>(std::floor(t1_frac * T)),
                      static_cast<int>(std::floor(t2_frac * T)));
}

void DiffusionSchedule::validate() const {
    if (T < 1 || static_cast<int>(betas.size()) != T) {
        throw Error(ErrorKind::Precondition, "schedule length mismatch");
    }
    for (std::size_t i = 0; i < betas.size(); ++i) {
        if (!(betas[i] > 0.0 && betas[i] < 1.0)) {
            throw Error(ErrorKind::Precondition, "beta outside (0,1)");
        }
        if (i > 0 && betas[i] < betas[i - 1]) {
            throw Error(ErrorKind::Precondition, "betas must be non-decreasing");
        }
    }
    if (!(0 <= t2 && t2 < t1 && t1 < T)) {
        throw Error(ErrorKind::Precondition, "sandwich points must satisfy 0 <= t2 < t1 < T");
    }
}

// ---------------------------------------------------------------------------

DiffusionSchedule PipelineConfig::schedule() const {
    return DiffusionSchedule::linear(T, beta_start, beta_end, t1_frac, t2_frac);
}

void PipelineConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::Usage, what); };
    if (frame_count < 2) fail("frame count must be >= 2");
    if (sigma < 1) fail("sigma must be >= 1");
    if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma must lie in (0, 1]");
    if (latent_factor < 1 || image_size < latent_factor || image_size % latent_factor != 0) {
        fail("image size must be a positive multiple of the latent factor");
    }
    if (!(segmentation_confidence > 0.0 && segmentation_confidence <= 1.0)) {
        fail("segmentation confidence must lie in (0, 1]");
    }
    if (!(attention_mix >= 0.0 && attention_mix <= 1.0)) fail("attention mix must lie in [0, 1]");
    if (attention_patch < 1 || latent_size() % attention_patch != 0) {
        fail("attention patch must divide the latent size");
    }
    if (threads < 1) fail("threads must be >= 1");
    try {
        schedule();
    } catch (const Error& e) {
        fail(e.what());
    }
}

std::string to_string(BackendKind kind) { return kind == BackendKind::Toy ? "toy" : "bridge"; }

std::string to_string(LlmMode mode) {
    switch (mode) {
    case LlmMode::Fallback: return "fallback";
    case LlmMode::Replay: return "replay";
    case LlmMode::Http: return "http";
    }
    return "fallback";
}

}  // namespace motionwarp
