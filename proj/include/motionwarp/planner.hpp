// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "motionwarp/core.hpp"

namespace motionwarp {

class LlmProvider;
class SegmentationProvider;

enum class PromptKind { MovingObjects, Directions, Skeleton };

/// "moving_objects" | "directions" | "skeleton"; anything else is Error(Usage).
PromptKind parse_prompt_kind(std::string_view text);

struct HeadingHint {
    std::string character;
    Direction heading = Direction::Right;  // never motionless
};

/// Renders one of the LLM commands for `user_prompt`. A heading hint
/// appends "And the <character> is heading towards <direction>.".
std::string build_prompt(PromptKind kind, std::string_view user_prompt, const std::optional<HeadingHint>& heading,
                         int frame_count);

/// Parses answers shaped like `["airplane": "down", "runway": "motionless"]`,
/// one bracketed list per group of transitions. G groups cover the F-1
/// transitions in runs of ceil((F-1)/G), so the usual four groups for eight
/// frames expand each answer to two frames. Characters missing from a group
/// are motionless for it; characters that never move fold into the
/// background. Direction strings are matched leniently.
///
/// Throws ParseError (with byte offset) on malformed text and
/// VocabularyError naming the token that matches no label.
MotionPlan parse_motion_plan(std::string_view llm_text, int frame_count);

/// Writes a plan in the answer format, one group per transition, so that
/// parse_motion_plan(format_motion_answer(p), F) == p for plans whose
/// characters all move and whose phrase equals their name.
std::string format_motion_answer(const MotionPlan& plan);

/// Splits a free-text "moving objects" answer into names.
std::vector<std::string> parse_moving_objects(std::string_view llm_text);

// ---------------------------------------------------------------------------
// Rule-based fallback
// ---------------------------------------------------------------------------

/// Marker for lexicon entries whose direction comes from the first frame.
struct FollowHeading {
    friend bool operator==(const FollowHeading&, const FollowHeading&) = default;
};
using LexiconStep = std::variant<Direction, FollowHeading>;

struct LexiconEntry {
    std::string verb;                 // lowercase, may span several words
    std::vector<LexiconStep> stages;  // one or two stages
};

using Lexicon = std::vector<LexiconEntry>;

Lexicon default_lexicon();
/// JSON object: verb -> "direction" | "heading" | ["up", "down"].
Lexicon lexicon_from_json(std::string_view text);

struct FallbackPlan {
    MotionPlan plan;
    std::vector<std::string> warnings;
    std::vector<std::string> needs_heading;  // characters whose verb follows the heading
};

/// Deterministic offline planner: every lexicon verb found in the prompt
/// turns the noun phrase in front of it into a character. Two-stage verbs
/// switch stage at transition ceil((F-1)/2). Without any match the plan is a
/// single motionless character and a warning is recorded.
FallbackPlan fallback_plan(std::string_view user_prompt, int frame_count, const Lexicon& lexicon,
                           std::span<const HeadingHint> headings = {});

/// Asks the provider for the moving-direction answer, retrying until a
/// parseable answer arrives. The first parseable answer wins.
MotionPlan plan_with_llm(LlmProvider& provider, std::string_view user_prompt,
                         const std::optional<HeadingHint>& heading, int frame_count, int attempts = 3);

// ---------------------------------------------------------------------------
// Headings
// ---------------------------------------------------------------------------

class HeadingProvider {
public:
    virtual ~HeadingProvider() = default;
    /// Throws Error(NotFound) when the character is not visible and
    /// BackendError when the provider cannot be reached.
    virtual Direction heading(const FrameImage& frame, std::string_view character) = 0;
};

/// Answers with configured headings. Visibility is checked with the given
/// segmenter, when one is supplied.
class StubHeadingProvider final : public HeadingProvider {
public:
    explicit StubHeadingProvider(Direction heading, SegmentationProvider* visibility = nullptr);
    StubHeadingProvider(std::map<std::string, Direction> headings, SegmentationProvider* visibility = nullptr);

    void set_reachable(bool reachable) { m_reachable = reachable; }

    Direction heading(const FrameImage& frame, std::string_view character) override;

private:
    std::optional<Direction> m_default;
    std::map<std::string, Direction> m_headings;
    SegmentationProvider* m_visibility;
    bool m_reachable = true;
};

HeadingHint resolve_heading(const FrameImage& first_frame, std::string_view character, HeadingProvider& provider);

// ---------------------------------------------------------------------------
// Skeleton plans
// ---------------------------------------------------------------------------

inline constexpr std::array<std::string_view, 10> kSkeletonNodes = {
    "head",      "left_shoulder", "right_shoulder", "left_hand", "right_hand",
    "pelvis",    "left_knee",     "right_knee",     "left_foot", "right_foot",
};

/// Index into kSkeletonNodes, accepting spaces/hyphens/case variants.
std::optional<std::size_t> skeleton_node_index(std::string_view name);

struct SkeletonPlan {
    int frame_count = 0;
    /// nodes[n][k - 1] is node n's direction moving into frame k (0-based).
    std::array<std::vector<Direction>, 10> nodes;

    static SkeletonPlan motionless(int frame_count);
    friend bool operator==(const SkeletonPlan&, const SkeletonPlan&) = default;
};

/// Parses `Frame k: <node>: <direction>` lines. Frames are numbered 1..F;
/// "Frame k" is the move that arrives at frame k, so k = 1 may only say
/// motionless. Throws Error(Schema) on an unknown node and Error(Range) on
/// a frame outside the video.
SkeletonPlan parse_skeleton_plan(std::string_view llm_text, int frame_count);

/// Canned skeleton motions for a few verbs ("waving", "jumping", ...);
/// motionless otherwise.
SkeletonPlan fallback_skeleton_plan(std::string_view user_prompt, int frame_count);

}  // namespace motionwarp
