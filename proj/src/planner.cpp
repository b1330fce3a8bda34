// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include "motionwarp/planner.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <nlohmann/json.hpp>

#include "motionwarp/llm.hpp"
#include "motionwarp/segmenter.hpp"

namespace motionwarp {

namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view text) {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    return std::string(text.substr(b, e - b));
}

std::string vocabulary_list() {
    // Order as the command lists it.
    constexpr std::array<Direction, 9> kOrder = {
        Direction::Motionless, Direction::Left,    Direction::Right,    Direction::Up,      Direction::Down,
        Direction::LeftDown,   Direction::LeftUp, Direction::RightDown, Direction::RightUp,
    };
    std::string out = "[";
    for (std::size_t i = 0; i < kOrder.size(); ++i) {
        if (i > 0) out += ", ";
        out += "\"";
        out += to_spoken(kOrder[i]);
        out += "\"";
    }
    out += "]";
    return out;
}

// ---------------------------------------------------------------------------
// Answer-list scanner
// ---------------------------------------------------------------------------

class AnswerScanner {
public:
    explicit AnswerScanner(std::string_view text) : m_text(text) {}

    using Group = std::vector<std::pair<std::string, std::string>>;

    std::vector<Group> groups() {
        std::vector<Group> out;
        while (true) {
            const std::size_t open = m_text.find('[', m_pos);
            if (open == std::string_view::npos) {
                break;
            }
            m_pos = open + 1;
            out.push_back(group());
        }
        if (out.empty()) {
            throw ParseError(0, "no bracketed answer list found");
        }
        return out;
    }

private:
    Group group() {
        Group entries;
        skip_ws();
        if (peek() == ']') {
            ++m_pos;
            return entries;
        }
        while (true) {
            skip_ws();
            std::string key = token(':');
            skip_ws();
            if (peek() != ':') {
                throw ParseError(m_pos, "expected ':' after '" + key + "'");
            }
            ++m_pos;
            skip_ws();
            std::string value = token(',');
            skip_ws();
            entries.emplace_back(std::move(key), std::move(value));
            const char c = peek();
            if (c == ',') {
                ++m_pos;
                skip_ws();
                if (peek() == ']') {  // trailing comma
                    ++m_pos;
                    return entries;
                }
                continue;
            }
            if (c == ']') {
                ++m_pos;
                return entries;
            }
            if (c == '\0') {
                throw ParseError(m_pos, "unterminated answer list");
            }
            throw ParseError(m_pos, std::string("unexpected character '") + c + "' in answer list");
        }
    }

    // Quoted string (ASCII or typographic quotes) or a bare run of text up
    // to the delimiter.
    std::string token(char delimiter) {
        const std::size_t start = m_pos;
        if (const std::size_t q = quote_len(m_pos); q > 0) {
            m_pos += q;
            const std::size_t body = m_pos;
            while (m_pos < m_text.size()) {
                if (const std::size_t close = quote_len(m_pos); close > 0) {
                    std::string out(m_text.substr(body, m_pos - body));
                    m_pos += close;
                    return trim(out);
                }
                if (m_text[m_pos] == '\n' || m_text[m_pos] == ']') {
                    break;
                }
                ++m_pos;
            }
            throw ParseError(start, "unterminated quoted string");
        }
        while (m_pos < m_text.size() && m_text[m_pos] != delimiter && m_text[m_pos] != ']' &&
               m_text[m_pos] != '[' && m_text[m_pos] != '\n' && !(delimiter == ',' && m_text[m_pos] == ':')) {
            ++m_pos;
        }
        std::string out = trim(m_text.substr(start, m_pos - start));
        if (out.empty()) {
            if (m_pos >= m_text.size()) {
                throw ParseError(m_pos, "unterminated answer list");
            }
            throw ParseError(start, "expected a quoted name or direction");
        }
        return out;
    }

    std::size_t quote_len(std::size_t at) const {
        if (at >= m_text.size()) return 0;
        const char c = m_text[at];
        if (c == '"' || c == '\'' || c == '`') return 1;
        // U+2018, U+2019, U+201C, U+201D
        if (at + 2 < m_text.size() && static_cast<unsigned char>(c) == 0xE2 &&
            static_cast<unsigned char>(m_text[at + 1]) == 0x80) {
            const auto third = static_cast<unsigned char>(m_text[at + 2]);
            if (third == 0x98 || third == 0x99 || third == 0x9C || third == 0x9D) return 3;
        }
        return 0;
    }

    void skip_ws() {
        while (m_pos < m_text.size() && std::isspace(static_cast<unsigned char>(m_text[m_pos]))) ++m_pos;
    }

    char peek() const { return m_pos < m_text.size() ? m_text[m_pos] : '\0'; }

    std::string_view m_text;
    std::size_t m_pos = 0;
};

// ---------------------------------------------------------------------------
// Fallback helpers
// ---------------------------------------------------------------------------

struct Word {
    std::string text;
    bool boundary;  // punctuation or conjunction that ends a noun phrase
};

std::vector<Word> tokenize(std::string_view prompt) {
    static const std::set<std::string> kConjunctions = {"and", "while", "then", "as", "but", "when", "after", "before"};
    std::vector<Word> words;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            words.push_back({cur, kConjunctions.count(cur) > 0});
            cur.clear();
        }
    };
    for (char raw : prompt) {
        const auto c = static_cast<unsigned char>(raw);
        if (std::isalnum(c) || raw == '\'') {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
            if (raw == ',' || raw == '.' || raw == ';' || raw == '!' || raw == '?' || raw == ':') {
                words.push_back({std::string(1, raw), true});
            }
        }
    }
    flush();
    return words;
}

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> out;
    for (const auto& w : tokenize(text)) {
        if (!w.boundary) out.push_back(w.text);
    }
    return out;
}

bool is_filler(const std::string& w) {
    static const std::set<std::string> kFiller = {
        "a",     "an",    "the",    "is",     "are",    "was",     "were",  "be",   "being",  "its",
        "their", "his",   "her",    "keeps",  "keep",   "starts",  "start", "begins", "slowly", "quickly",
        "suddenly", "there", "this", "that",  "some",   "gently",  "fast",  "now"};
    return kFiller.count(w) > 0;
}

std::vector<Direction> expand_stages(const LexiconEntry& entry, int transitions, std::optional<Direction> heading,
                                     FallbackPlan& result, const std::string& name) {
    auto resolve = [&](const LexiconStep& step) {
        if (const auto* d = std::get_if<Direction>(&step)) {
            return *d;
        }
        if (std::find(result.needs_heading.begin(), result.needs_heading.end(), name) == result.needs_heading.end()) {
            result.needs_heading.push_back(name);
        }
        if (heading) {
            return *heading;
        }
        result.warnings.push_back("no heading known for '" + name + "' ('" + entry.verb + "'); kept motionless");
        return Direction::Motionless;
    };
    std::vector<Direction> dirs(static_cast<std::size_t>(transitions));
    if (entry.stages.size() == 1) {
        std::fill(dirs.begin(), dirs.end(), resolve(entry.stages[0]));
        return dirs;
    }
    // The second stage starts at transition ceil(n/2) (1-based).
    const int second_start = (transitions + 1) / 2 - 1;
    const Direction first = resolve(entry.stages[0]);
    const Direction second = resolve(entry.stages[1]);
    for (int j = 0; j < transitions; ++j) {
        dirs[static_cast<std::size_t>(j)] = j < second_start ? first : second;
    }
    return dirs;
}

LexiconStep parse_step(const std::string& text) {
    if (lower(text) == "heading") {
        return FollowHeading{};
    }
    if (auto d = match_direction(text)) {
        return *d;
    }
    throw VocabularyError(text);
}

std::string spoken_node(std::string_view node) {
    std::string out(node);
    std::replace(out.begin(), out.end(), '_', ' ');
    return out;
}

}  // namespace

PromptKind parse_prompt_kind(std::string_view text) {
    if (text == "moving_objects") return PromptKind::MovingObjects;
    if (text == "directions") return PromptKind::Directions;
    if (text == "skeleton") return PromptKind::Skeleton;
    throw Error(ErrorKind::Usage, "unknown prompt kind '" + std::string(text) + "'");
}

std::string build_prompt(PromptKind kind, std::string_view user_prompt, const std::optional<HeadingHint>& heading,
                         int frame_count) {
    if (trim(user_prompt).empty()) {
        throw Error(ErrorKind::Precondition, "user prompt is empty");
    }
    if (frame_count < 2) {
        throw Error(ErrorKind::Precondition, "frame count must be >= 2");
    }
    const std::string quoted = "\"" + std::string(user_prompt) + "\"";
    std::string out;
    switch (kind) {
    case PromptKind::MovingObjects:
        out = "Given a user prompt, identify the moving objects or parts. Prompt: " + quoted;
        break;
    case PromptKind::Directions:
        out = "Given a user prompt, elaborate the movement direction of the main characters or moving parts "
              "for each two frames of " +
              std::to_string(frame_count) +
              " frames. Motions should be consistent. Directions should be one of followings:" +
              vocabulary_list() +
              ". Answer the question in a list follow the format:[\"character name\": \"direction\", "
              "\"part name\": \"direction\", ...].\nPrompt: " +
              quoted;
        break;
    case PromptKind::Skeleton: {
        std::string nodes;
        for (std::size_t i = 0; i < kSkeletonNodes.size(); ++i) {
            if (i > 0) nodes += ", ";
            nodes += spoken_node(kSkeletonNodes[i]);
        }
        out = "Given a user prompt, describe how a human skeleton moves over " + std::to_string(frame_count) +
              " frames. The skeleton has 10 nodes: [" + nodes +
              "]. Directions should be one of followings:" + vocabulary_list() +
              ". Answer with one line per moving node in the format \"Frame k: node: direction\", "
              "where k runs from 2 to " +
              std::to_string(frame_count) + ".\nPrompt: " + quoted;
        break;
    }
    }
    if (heading) {
        if (heading->heading == Direction::Motionless) {
            throw Error(ErrorKind::Precondition, "a heading hint cannot be motionless");
        }
        out += " And the " + heading->character + " is heading towards " + std::string(to_spoken(heading->heading)) +
               ".";
    }
    return out;
}

MotionPlan parse_motion_plan(std::string_view llm_text, int frame_count) {
    if (frame_count < 2) {
        throw Error(ErrorKind::Precondition, "frame count must be >= 2");
    }
    AnswerScanner scanner(llm_text);
    const auto groups = scanner.groups();

    std::vector<std::string> order;
    std::vector<std::vector<std::pair<std::string, Direction>>> resolved(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (const auto& [raw_name, raw_dir] : groups[g]) {
            const std::string name = lower(raw_name);
            const auto dir = match_direction(raw_dir);
            if (!dir) {
                throw VocabularyError(raw_dir);
            }
            if (name == kBackgroundName) {
                continue;
            }
            if (std::find(order.begin(), order.end(), name) == order.end()) {
                order.push_back(name);
            }
            resolved[g].emplace_back(name, *dir);
        }
    }

    const int transitions = frame_count - 1;
    const int n_groups = static_cast<int>(groups.size());
    const int span = (transitions + n_groups - 1) / n_groups;

    MotionPlan plan;
    plan.frame_count = frame_count;
    for (const auto& name : order) {
        CharacterPlan ch;
        ch.name = name;
        ch.phrase = name;
        ch.directions.assign(static_cast<std::size_t>(transitions), Direction::Motionless);
        for (int j = 0; j < transitions; ++j) {
            const auto& group = resolved[static_cast<std::size_t>(std::min(j / span, n_groups - 1))];
            for (const auto& [entry_name, dir] : group) {
                if (entry_name == name) {
                    ch.directions[static_cast<std::size_t>(j)] = dir;
                }
            }
        }
        if (!ch.is_motionless()) {
            plan.characters.push_back(std::move(ch));
        }
    }
    plan.validate();
    return plan;
}

std::string format_motion_answer(const MotionPlan& plan) {
    std::string out;
    for (int j = 0; j < plan.frame_count - 1; ++j) {
        out += "[";
        for (std::size_t i = 0; i < plan.characters.size(); ++i) {
            if (i > 0) out += ", ";
            const auto& ch = plan.characters[i];
            out += "\"" + ch.name + "\": \"" + std::string(to_spoken(ch.directions[static_cast<std::size_t>(j)])) + "\"";
        }
        out += "]\n";
    }
    return out;
}

std::vector<std::string> parse_moving_objects(std::string_view llm_text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        std::string item = trim(cur);
        cur.clear();
        // strip list markers and quotes
        while (!item.empty() && (std::isdigit(static_cast<unsigned char>(item.front())) || item.front() == '-' ||
                                 item.front() == '*' || item.front() == '.' || item.front() == ')' ||
                                 item.front() == '"' || item.front() == '\'' || item.front() == '[' ||
                                 std::isspace(static_cast<unsigned char>(item.front())))) {
            item.erase(item.begin());
        }
        while (!item.empty() && (item.back() == '"' || item.back() == '\'' || item.back() == '.' ||
                                 item.back() == ']' || std::isspace(static_cast<unsigned char>(item.back())))) {
            item.pop_back();
        }
        if (const auto colon = item.find(':'); colon != std::string::npos) {
            item = trim(item.substr(colon + 1));
        }
        item = lower(item);
        if (!item.empty() && std::find(out.begin(), out.end(), item) == out.end()) {
            out.push_back(item);
        }
    };
    for (char c : llm_text) {
        if (c == ',' || c == '\n' || c == ';') {
            flush();
        } else {
            cur.push_back(c);
        }
    }
    flush();
    return out;
}

// ---------------------------------------------------------------------------

Lexicon default_lexicon() {
    const Direction up = Direction::Up;
    const Direction down = Direction::Down;
    return {
        {"taking off", {up}},
        {"jumping over", {up, down}},
        {"jumping", {up, down}},
        {"leaping", {up, down}},
        {"bouncing", {up, down}},
        {"landing", {down}},
        {"falling", {down}},
        {"sinking", {down}},
        {"descending", {down}},
        {"diving", {down}},
        {"skiing down", {down}},
        {"skateboarding down", {down}},
        {"sliding down", {down}},
        {"rising", {up}},
        {"climbing", {up}},
        {"ascending", {up}},
        {"flying up", {up}},
        {"moving left", {Direction::Left}},
        {"moving right", {Direction::Right}},
        {"moving up", {up}},
        {"moving down", {down}},
        {"walking", {FollowHeading{}}},
        {"running", {FollowHeading{}}},
        {"driving", {FollowHeading{}}},
        {"riding", {FollowHeading{}}},
        {"swimming", {FollowHeading{}}},
        {"flying", {FollowHeading{}}},
        {"galloping", {FollowHeading{}}},
        {"moving", {FollowHeading{}}},
    };
}

Lexicon lexicon_from_json(std::string_view text) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.byte, "invalid lexicon JSON");
    }
    if (!doc.is_object()) {
        throw Error(ErrorKind::Schema, "lexicon must be a JSON object");
    }
    Lexicon lexicon;
    for (const auto& [verb, value] : doc.items()) {
        LexiconEntry entry;
        entry.verb = lower(verb);
        if (value.is_string()) {
            entry.stages.push_back(parse_step(value.get<std::string>()));
        } else if (value.is_array() && !value.empty() && value.size() <= 2) {
            for (const auto& step : value) {
                if (!step.is_string()) {
                    throw Error(ErrorKind::Schema, "lexicon stages must be strings");
                }
                entry.stages.push_back(parse_step(step.get<std::string>()));
            }
        } else {
            throw Error(ErrorKind::Schema, "lexicon entry '" + verb + "' must be a string or a 1-2 element array");
        }
        lexicon.push_back(std::move(entry));
    }
    if (lexicon.empty()) {
        throw Error(ErrorKind::Precondition, "lexicon is empty");
    }
    return lexicon;
}

FallbackPlan fallback_plan(std::string_view user_prompt, int frame_count, const Lexicon& lexicon,
                           std::span<const HeadingHint> headings) {
    if (lexicon.empty()) {
        throw Error(ErrorKind::Precondition, "lexicon is empty");
    }
    if (frame_count < 2) {
        throw Error(ErrorKind::Precondition, "frame count must be >= 2");
    }
    // Longest verbs first so "jumping over" beats "jumping".
    std::vector<std::pair<std::vector<std::string>, const LexiconEntry*>> verbs;
    for (const auto& entry : lexicon) {
        verbs.emplace_back(split_words(entry.verb), &entry);
    }
    std::stable_sort(verbs.begin(), verbs.end(),
                     [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });

    const auto words = tokenize(user_prompt);
    FallbackPlan result;
    result.plan.frame_count = frame_count;
    const int transitions = frame_count - 1;

    std::size_t subject_start = 0;
    for (std::size_t i = 0; i < words.size();) {
        if (words[i].boundary) {
            subject_start = i + 1;
            ++i;
            continue;
        }
        const LexiconEntry* hit = nullptr;
        std::size_t hit_len = 0;
        for (const auto& [verb_words, entry] : verbs) {
            if (verb_words.empty() || i + verb_words.size() > words.size()) continue;
            bool match = true;
            for (std::size_t j = 0; j < verb_words.size(); ++j) {
                if (words[i + j].boundary || words[i + j].text != verb_words[j]) {
                    match = false;
                    break;
                }
            }
            if (match) {
                hit = entry;
                hit_len = verb_words.size();
                break;
            }
        }
        if (hit == nullptr) {
            ++i;
            continue;
        }
        std::string name;
        for (std::size_t j = subject_start; j < i; ++j) {
            if (is_filler(words[j].text)) continue;
            if (!name.empty()) name += " ";
            name += words[j].text;
        }
        if (!name.empty() && name != kBackgroundName && result.plan.find(name) == nullptr) {
            std::optional<Direction> heading;
            for (const auto& hint : headings) {
                const std::string hint_name = lower(hint.character);
                if (hint_name == name || name.find(hint_name) != std::string::npos ||
                    hint_name.find(name) != std::string::npos) {
                    heading = hint.heading;
                    break;
                }
            }
            CharacterPlan ch;
            ch.name = name;
            ch.phrase = name;
            ch.directions = expand_stages(*hit, transitions, heading, result, name);
            result.plan.characters.push_back(std::move(ch));
        }
        i += hit_len;
        subject_start = i;
    }

    if (result.plan.characters.empty()) {
        CharacterPlan ch;
        ch.name = "subject";
        ch.phrase = trim(user_prompt);
        ch.directions.assign(static_cast<std::size_t>(transitions), Direction::Motionless);
        result.plan.characters.push_back(std::move(ch));
        result.warnings.push_back("no motion verb recognised; plan is motionless");
    }
    result.plan.validate();
    return result;
}

MotionPlan plan_with_llm(LlmProvider& provider, std::string_view user_prompt,
                         const std::optional<HeadingHint>& heading, int frame_count, int attempts) {
    const std::string prompt = build_prompt(PromptKind::Directions, user_prompt, heading, frame_count);
    std::optional<Error> last;
    for (int attempt = 0; attempt < std::max(attempts, 1); ++attempt) {
        const std::string answer = provider.complete(prompt);
        try {
            return parse_motion_plan(answer, frame_count);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Parse && e.kind() != ErrorKind::Vocabulary) {
                throw;
            }
            last = e;
        }
    }
    throw *last;
}

// ---------------------------------------------------------------------------

StubHeadingProvider::StubHeadingProvider(Direction heading, SegmentationProvider* visibility)
    : m_default(heading), m_visibility(visibility) {}

StubHeadingProvider::StubHeadingProvider(std::map<std::string, Direction> headings, SegmentationProvider* visibility)
    : m_headings(std::move(headings)), m_visibility(visibility) {}

Direction StubHeadingProvider::heading(const FrameImage& frame, std::string_view character) {
    if (!m_reachable) {
        throw BackendError("heading-stub", "provider unreachable");
    }
    if (m_visibility != nullptr && m_visibility->segment(frame, character, 0.3).empty()) {
        throw Error(ErrorKind::NotFound, "'" + std::string(character) + "' is not visible in the frame");
    }
    if (auto it = m_headings.find(lower(character)); it != m_headings.end()) {
        return it->second;
    }
    if (m_default) {
        return *m_default;
    }
    throw Error(ErrorKind::NotFound, "no heading configured for '" + std::string(character) + "'");
}

HeadingHint resolve_heading(const FrameImage& first_frame, std::string_view character, HeadingProvider& provider) {
    const Direction d = provider.heading(first_frame, character);
    if (d == Direction::Motionless) {
        throw Error(ErrorKind::NotFound, "provider reported no heading for '" + std::string(character) + "'");
    }
    return {std::string(character), d};
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> skeleton_node_index(std::string_view name) {
    std::string norm;
    bool gap = false;
    for (char raw : name) {
        const auto c = static_cast<unsigned char>(raw);
        if (std::isspace(c) || raw == '_' || raw == '-') {
            gap = !norm.empty();
            continue;
        }
        if (gap) {
            norm.push_back('_');
            gap = false;
        }
        norm.push_back(static_cast<char>(std::tolower(c)));
    }
    for (std::size_t i = 0; i < kSkeletonNodes.size(); ++i) {
        if (kSkeletonNodes[i] == norm) return i;
    }
    return std::nullopt;
}

SkeletonPlan SkeletonPlan::motionless(int frame_count) {
    SkeletonPlan plan;
    plan.frame_count = frame_count;
    for (auto& node : plan.nodes) {
        node.assign(static_cast<std::size_t>(std::max(frame_count - 1, 0)), Direction::Motionless);
    }
    return plan;
}

SkeletonPlan parse_skeleton_plan(std::string_view llm_text, int frame_count) {
    if (frame_count < 2) {
        throw Error(ErrorKind::Precondition, "frame count must be >= 2");
    }
    SkeletonPlan plan = SkeletonPlan::motionless(frame_count);
    std::size_t line_start = 0;
    while (line_start <= llm_text.size()) {
        std::size_t line_end = llm_text.find('\n', line_start);
        if (line_end == std::string_view::npos) line_end = llm_text.size();
        const std::string_view line = llm_text.substr(line_start, line_end - line_start);
        const std::string low = lower(line);
        const std::size_t at = low.find("frame");
        if (at != std::string::npos) {
            std::size_t p = at + 5;
            while (p < low.size() && std::isspace(static_cast<unsigned char>(low[p]))) ++p;
            std::size_t digits = p;
            while (digits < low.size() && std::isdigit(static_cast<unsigned char>(low[digits]))) ++digits;
            if (digits > p) {
                const std::size_t first_colon = low.find(':', digits);
                const std::size_t second_colon =
                    first_colon == std::string::npos ? std::string::npos : low.find(':', first_colon + 1);
                if (second_colon == std::string::npos) {
                    throw ParseError(line_start + digits, "expected 'Frame k: node: direction'");
                }
                const int k = std::stoi(std::string(low.substr(p, digits - p)));
                const std::string node = trim(line.substr(first_colon + 1, second_colon - first_colon - 1));
                std::string dir_text = trim(line.substr(second_colon + 1));
                while (!dir_text.empty() && (dir_text.back() == '.' || dir_text.back() == ',')) dir_text.pop_back();
                if (k < 1 || k > frame_count) {
                    throw Error(ErrorKind::Range, "frame " + std::to_string(k) + " outside 1.." + std::to_string(frame_count));
                }
                const auto index = skeleton_node_index(node);
                if (!index) {
                    throw Error(ErrorKind::Schema, "unknown skeleton node '" + node + "'");
                }
                const auto dir = match_direction(dir_text);
                if (!dir) {
                    throw VocabularyError(dir_text);
                }
                if (k == 1) {
                    if (*dir != Direction::Motionless) {
                        throw Error(ErrorKind::Range, "frame 1 is the rest pose and cannot move");
                    }
                } else {
                    plan.nodes[*index][static_cast<std::size_t>(k - 2)] = *dir;
                }
            }
        }
        line_start = line_end + 1;
    }
    return plan;
}

SkeletonPlan fallback_skeleton_plan(std::string_view user_prompt, int frame_count) {
    if (frame_count < 2) {
        throw Error(ErrorKind::Precondition, "frame count must be >= 2");
    }
    SkeletonPlan plan = SkeletonPlan::motionless(frame_count);
    const std::string low = lower(user_prompt);
    const auto idx = [](std::string_view n) { return *skeleton_node_index(n); };
    const int n = frame_count - 1;
    if (low.find("wav") != std::string::npos) {
        for (int j = 0; j < n; ++j) {
            plan.nodes[idx("right_hand")][static_cast<std::size_t>(j)] = j % 2 == 0 ? Direction::Right : Direction::Left;
        }
    } else if (low.find("jump") != std::string::npos) {
        const int second_start = (n + 1) / 2 - 1;
        for (auto& node : plan.nodes) {
            for (int j = 0; j < n; ++j) {
                node[static_cast<std::size_t>(j)] = j < second_start ? Direction::Up : Direction::Down;
            }
        }
    } else if (low.find("raising") != std::string::npos || low.find("raise") != std::string::npos) {
        for (int j = 0; j < n; ++j) {
            plan.nodes[idx("left_hand")][static_cast<std::size_t>(j)] = Direction::Up;
            plan.nodes[idx("right_hand")][static_cast<std::size_t>(j)] = Direction::Up;
        }
    }
    return plan;
}

}  // namespace motionwarp
