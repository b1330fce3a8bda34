// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include "motionwarp/scene.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace motionwarp::toy {

namespace {

struct BackgroundSpec {
    std::vector<std::string> keywords;
    std::string name;
    Rgb color;
};

const std::vector<BackgroundSpec>& background_registry() {
    static const std::vector<BackgroundSpec> kBackgrounds = {
        {{"sky", "cloudy", "clouds"}, "sky", {120, 170, 230}},
        {{"grass", "field", "meadow", "lawn"}, "grass", {90, 160, 80}},
        {{"snow", "snowy", "mountain"}, "snow", {235, 235, 240}},
        {{"night", "dark"}, "night", {20, 20, 40}},
        {{"beach", "sand", "desert"}, "sand", {220, 200, 150}},
        {{"water", "sea", "pool", "lake", "river"}, "water", {50, 110, 170}},
        {{"road", "street"}, "road", {90, 90, 90}},
        {{"gray", "grey"}, "gray", {128, 128, 128}},
    };
    return kBackgrounds;
}

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Position of `needle` in `hay` as whole words, or npos.
std::size_t find_words(const std::string& hay, const std::string& needle) {
    std::size_t pos = hay.find(needle);
    while (pos != std::string::npos) {
        const bool left_ok = pos == 0 || !is_word_char(hay[pos - 1]);
        const std::size_t end = pos + needle.size();
        // allow a plural 's'
        std::size_t tail = end;
        if (tail < hay.size() && hay[tail] == 's') {
            ++tail;
        }
        const bool right_ok = end >= hay.size() || !is_word_char(hay[end]) || tail >= hay.size() ||
                              !is_word_char(hay[tail]);
        if (left_ok && right_ok) {
            return pos;
        }
        pos = hay.find(needle, pos + 1);
    }
    return std::string::npos;
}

std::size_t entity_position(const std::string& hay, const EntitySpec& spec) {
    std::size_t best = find_words(hay, spec.name);
    for (const auto& alias : spec.aliases) {
        best = std::min(best, find_words(hay, alias));
    }
    return best;
}

int align_down(int v, int align) { return v / align * align; }
int align_up(int v, int align) { return (v + align - 1) / align * align; }

void paint(FrameImage& image, Mask& truth, const EntitySpec& spec, int x0, int y0, int w, int h) {
    const double cx = x0 + w / 2.0;
    const double cy = y0 + h / 2.0;
    for (int y = std::max(0, y0); y < std::min(image.height, y0 + h); ++y) {
        for (int x = std::max(0, x0); x < std::min(image.width, x0 + w); ++x) {
            const double px = x + 0.5;
            const double py = y + 0.5;
            bool inside = true;
            if (spec.shape == Shape::Circle) {
                const double rx = (px - cx) / (w / 2.0);
                const double ry = (py - cy) / (h / 2.0);
                inside = rx * rx + ry * ry <= 1.0;
            } else if (spec.shape == Shape::Wedge) {
                // Isosceles triangle with its apex on the facing side.
                const Delta dir = direction_to_delta(spec.facing.value_or(Direction::Right), 1);
                double along = 0.0;
                double across = 0.0;
                double half_len = 0.0;
                double half_wid = 0.0;
                if (dir.dx != 0) {
                    along = (px - cx) * dir.dx;
                    across = py - cy;
                    half_len = w / 2.0;
                    half_wid = h / 2.0;
                } else {
                    along = (py - cy) * dir.dy;
                    across = px - cx;
                    half_len = h / 2.0;
                    half_wid = w / 2.0;
                }
                const double t = (half_len - along) / (2.0 * half_len);  // 0 at apex, 1 at base
                inside = t >= 0.0 && t <= 1.0 && std::abs(across) <= half_wid * t;
            }
            if (inside) {
                auto* p = image.pixel(x, y);
                p[0] = spec.color[0];
                p[1] = spec.color[1];
                p[2] = spec.color[2];
                truth.set(x, y, true);
            }
        }
    }
}

}  // namespace

const std::vector<EntitySpec>& entity_registry() {
    static const std::vector<EntitySpec> kEntities = {
        {"red square", {}, {220, 40, 40}, Shape::Rect, 1.0 / 8, 1.0 / 8, Placement::Row, std::nullopt},
        {"blue square", {}, {40, 80, 220}, Shape::Rect, 1.0 / 8, 1.0 / 8, Placement::Row, std::nullopt},
        {"green square", {}, {40, 170, 70}, Shape::Rect, 1.0 / 8, 1.0 / 8, Placement::Row, std::nullopt},
        {"blue circle", {}, {30, 110, 230}, Shape::Circle, 1.0 / 8, 1.0 / 8, Placement::Row, std::nullopt},
        {"yellow ball", {"ball"}, {235, 200, 40}, Shape::Circle, 3.0 / 32, 3.0 / 32, Placement::Row, std::nullopt},
        {"airplane", {"plane", "aircraft", "jet"}, {200, 200, 215}, Shape::Wedge, 1.0 / 4, 1.0 / 8,
         Placement::Row, Direction::Left},
        {"bird", {}, {110, 70, 40}, Shape::Wedge, 1.0 / 16, 1.0 / 16, Placement::Row, Direction::Right},
        {"car", {"vehicle"}, {240, 130, 30}, Shape::Rect, 3.0 / 16, 3.0 / 32, Placement::Row,
         Direction::Right},
        {"horse", {}, {150, 95, 55}, Shape::Rect, 5.0 / 32, 7.0 / 64, Placement::Row, Direction::Right},
        {"man", {"person", "skier", "skateboarder", "boy"}, {230, 190, 160}, Shape::Rect, 1.0 / 16, 5.0 / 32,
         Placement::Row, Direction::Right},
        {"obstacle", {"fence", "hurdle"}, {150, 100, 200}, Shape::Rect, 1.0 / 8, 1.0 / 16, Placement::Row, std::nullopt},
        {"runway", {}, {60, 60, 60}, Shape::Rect, 1.0, 1.0 / 8, Placement::Bottom, std::nullopt},
        {"sun", {}, {255, 230, 80}, Shape::Circle, 1.0 / 8, 1.0 / 8, Placement::TopRight, std::nullopt},
    };
    return kEntities;
}

const EntitySpec* match_entity(std::string_view phrase) {
    const std::string hay = lower(phrase);
    const EntitySpec* best = nullptr;
    std::size_t best_pos = std::string::npos;
    for (const auto& spec : entity_registry()) {
        const std::size_t pos = entity_position(hay, spec);
        if (pos < best_pos) {
            best_pos = pos;
            best = &spec;
        }
    }
    return best;
}

std::string known_entities() {
    std::string out;
    for (const auto& spec : entity_registry()) {
        if (!out.empty()) out += ", ";
        out += spec.name;
    }
    return out;
}

const PlacedEntity* Scene::find(std::string_view phrase) const {
    const EntitySpec* spec = match_entity(phrase);
    for (const auto& e : entities) {
        if (e.spec == spec) {
            return &e;
        }
    }
    return nullptr;
}

Scene compile_scene(std::string_view prompt, int size, int align, bool allow_empty) {
    if (size <= 0 || align <= 0 || size % align != 0) {
        throw Error(ErrorKind::Precondition, "scene size must be a positive multiple of the alignment");
    }
    const std::string hay = lower(prompt);

    Scene scene;
    scene.background = {128, 128, 128};
    scene.background_name = "gray";
    std::size_t bg_pos = std::string::npos;
    for (const auto& bg : background_registry()) {
        for (const auto& kw : bg.keywords) {
            const std::size_t pos = find_words(hay, kw);
            if (pos < bg_pos) {
                bg_pos = pos;
                scene.background = bg.color;
                scene.background_name = bg.name;
            }
        }
    }

    std::vector<std::pair<std::size_t, const EntitySpec*>> mentioned;
    for (const auto& spec : entity_registry()) {
        const std::size_t pos = entity_position(hay, spec);
        if (pos != std::string::npos) {
            mentioned.emplace_back(pos, &spec);
        }
    }
    std::sort(mentioned.begin(), mentioned.end());
    if (mentioned.empty() && !allow_empty) {
        throw Error(ErrorKind::SceneCompile,
                    "prompt names no registered entity; known entities: " + known_entities());
    }

    scene.image = FrameImage(size, size);
    for (std::size_t i = 0; i < scene.image.rgb.size(); i += 3) {
        scene.image.rgb[i + 0] = scene.background[0];
        scene.image.rgb[i + 1] = scene.background[1];
        scene.image.rgb[i + 2] = scene.background[2];
    }

    int row_count = 0;
    for (const auto& [pos, spec] : mentioned) {
        if (spec->placement == Placement::Row) ++row_count;
    }

    // Fixed-placement entities paint first so movers stay on top.
    std::stable_sort(mentioned.begin(), mentioned.end(), [](const auto& a, const auto& b) {
        return (a.second->placement == Placement::Row) < (b.second->placement == Placement::Row);
    });

    int row_index = 0;
    for (const auto& [pos, spec] : mentioned) {
        PlacedEntity placed;
        placed.spec = spec;
        placed.width = std::max(align, align_up(static_cast<int>(std::lround(spec->width_frac * size)), align));
        placed.height = std::max(align, align_up(static_cast<int>(std::lround(spec->height_frac * size)), align));
        placed.width = std::min(placed.width, size);
        placed.height = std::min(placed.height, size);
        switch (spec->placement) {
        case Placement::Row: {
            ++row_index;
            const int cx = size * row_index / (row_count + 1);
            placed.x = std::clamp(align_down(cx - placed.width / 2, align), 0, size - placed.width);
            placed.y = std::clamp(align_down(size / 2 - placed.height / 2, align), 0, size - placed.height);
            break;
        }
        case Placement::Bottom:
            placed.x = 0;
            placed.y = size - placed.height;
            break;
        case Placement::TopRight:
            placed.x = size - placed.width - align_up(size / 16, align);
            placed.y = align_up(size / 16, align);
            break;
        }
        placed.ground_truth = Mask(size, size, Resolution::Image);
        paint(scene.image, placed.ground_truth, *spec, placed.x, placed.y, placed.width, placed.height);
        // Later sprites occlude earlier ones.
        for (auto& other : scene.entities) {
            other.ground_truth = other.ground_truth & ~placed.ground_truth;
        }
        scene.entities.push_back(std::move(placed));
    }
    return scene;
}

}  // namespace motionwarp::toy
