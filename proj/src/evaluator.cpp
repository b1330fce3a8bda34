// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include "motionwarp/evaluator.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "motionwarp/config.hpp"

namespace motionwarp {

Trajectory track_trajectory(std::span<const Mask> masks, std::string_view character) {
    if (masks.size() < 2) {
        throw Error(ErrorKind::Precondition, "a trajectory needs at least two frames");
    }
    Trajectory traj;
    traj.character = std::string(character);
    bool any = false;
    for (const auto& m : masks) {
        if (m.empty()) {
            traj.centers.emplace_back();
        } else {
            traj.centers.emplace_back(mask_center(m));
            any = true;
        }
    }
    if (!any) {
        throw Error(ErrorKind::NotFound, "'" + traj.character + "' is absent from every frame");
    }
    return traj;
}

double CorrectnessResult::accuracy() const {
    if (evaluated == 0) {
        throw Error(ErrorKind::UndefinedMetric, "no moving transition could be evaluated");
    }
    return static_cast<double>(correct) / evaluated;
}

std::optional<double> CorrectnessResult::motionless_accuracy() const {
    if (motionless_evaluated == 0) return std::nullopt;
    return static_cast<double>(motionless_correct) / motionless_evaluated;
}

CorrectnessResult score_motion(const Trajectory& trajectory, std::span<const Direction> plan, int sigma) {
    if (plan.size() + 1 != trajectory.centers.size()) {
        throw Error(ErrorKind::Precondition, "plan length must be frame count - 1");
    }
    CorrectnessResult r;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const auto& a = trajectory.centers[i];
        const auto& b = trajectory.centers[i + 1];
        if (!a || !b) {
            ++r.skipped;
            r.verdicts.push_back(Verdict::Skipped);
            continue;
        }
        const double px = b->x - a->x;
        const double py = b->y - a->y;
        bool ok = false;
        if (plan[i] == Direction::Motionless) {
            ok = std::hypot(px, py) <= sigma / 2.0;
            ++r.motionless_evaluated;
            r.motionless_correct += ok ? 1 : 0;
        } else {
            const Delta gt = direction_to_delta(plan[i], 1);
            // Sign of the cosine equals the sign of the dot product; a zero
            // displacement gives zero and scores wrong.
            ok = gt.dx * px + gt.dy * py > 0.0;
            ++r.evaluated;
            r.correct += ok ? 1 : 0;
        }
        r.verdicts.push_back(ok ? Verdict::Correct : Verdict::Wrong);
    }
    if (r.evaluated == 0 && r.motionless_evaluated == 0) {
        throw Error(ErrorKind::UndefinedMetric,
                    "no transition of '" + trajectory.character + "' could be evaluated");
    }
    return r;
}

double motion_correctness(const Trajectory& trajectory, std::span<const Direction> plan, int sigma) {
    return score_motion(trajectory, plan, sigma).accuracy();
}

std::vector<Direction> reversed_plan(std::span<const Direction> plan) {
    std::vector<Direction> out;
    out.reserve(plan.size());
    for (Direction d : plan) out.push_back(opposite(d));
    return out;
}

std::string emit_report(const RunReport& report) {
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["version"] = 1;
    doc["prompt"] = report.prompt;
    if (report.config) {
        doc["config"] = config_to_json(*report.config);
        const DiffusionSchedule sched = report.config->schedule();
        doc["schedule"] = {{"T", sched.T}, {"t1", sched.t1}, {"t2", sched.t2},
                           {"alpha_bar_t1", sched.alpha_bar(sched.t1)}, {"alpha_bar_T", sched.alpha_bar(sched.T)}};
    } else {
        doc["config"] = nullptr;
        doc["schedule"] = nullptr;
    }

    ordered_json chars = ordered_json::array();
    double sum = 0.0;
    int scored = 0;
    for (const auto& c : report.characters) {
        ordered_json entry;
        entry["name"] = c.name;
        ordered_json dirs = ordered_json::array();
        for (Direction d : c.plan) dirs.push_back(std::string(to_string(d)));
        entry["plan"] = dirs;
        ordered_json centers = ordered_json::array();
        for (const auto& p : c.trajectory.centers) {
            if (p) {
                centers.push_back({p->x, p->y});
            } else {
                centers.push_back(nullptr);
            }
        }
        entry["centers"] = centers;
        if (c.result && c.result->evaluated > 0) {
            const double acc = c.result->accuracy();
            entry["accuracy"] = acc;
            sum += acc;
            ++scored;
        } else {
            entry["accuracy"] = nullptr;
        }
        if (c.result) {
            entry["correct"] = c.result->correct;
            entry["evaluated"] = c.result->evaluated;
            entry["skipped"] = c.result->skipped;
            entry["motionless_correct"] = c.result->motionless_correct;
            entry["motionless_evaluated"] = c.result->motionless_evaluated;
            ordered_json verdicts = ordered_json::array();
            for (Verdict v : c.result->verdicts) {
                verdicts.push_back(v == Verdict::Correct ? "correct" : v == Verdict::Wrong ? "wrong" : "skipped");
            }
            entry["verdicts"] = verdicts;
        }
        if (!c.note.empty()) entry["note"] = c.note;
        chars.push_back(std::move(entry));
    }
    doc["characters"] = chars;
    doc["mean_accuracy"] = scored > 0 ? ordered_json(sum / scored) : ordered_json(nullptr);

    ordered_json anchors = ordered_json::array();
    for (const auto& a : report.anchors) anchors.push_back({{"frame", a.frame}, {"anchor", a.anchor}});
    doc["anchor_schedule"] = anchors;

    ordered_json slices = ordered_json::array();
    for (const auto& s : report.slices) slices.push_back({{"prompt", s.prompt}, {"start", s.start}, {"end", s.end}});
    doc["slices"] = slices;
    doc["warnings"] = report.warnings;
    return doc.dump(2) + "\n";
}

}  // namespace motionwarp
