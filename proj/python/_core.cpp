// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

// Python bindings. Masks cross the boundary as (H, W) bool arrays, latents as
// (C, H, W) float32 arrays; plans, configs and reports as JSON text.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

#include "motionwarp/config.hpp"
#include "motionwarp/evaluator.hpp"
#include "motionwarp/pipeline.hpp"
#include "motionwarp/planner.hpp"
#include "motionwarp/scheduler.hpp"
#include "motionwarp/segmenter.hpp"
#include "motionwarp/warp.hpp"

namespace py = pybind11;
namespace mw = motionwarp;

namespace {

using BoolArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;
using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

mw::Mask to_mask(const BoolArray& a) {
    if (a.ndim() != 2) throw mw::Error(mw::ErrorKind::Shape, "mask must be a 2-D array");
    const int h = static_cast<int>(a.shape(0));
    const int w = static_cast<int>(a.shape(1));
    mw::Mask m(w, h);
    auto r = a.unchecked<2>();
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) m.set(x, y, r(y, x));
    return m;
}

BoolArray from_mask(const mw::Mask& m) {
    BoolArray a({m.height(), m.width()});
    auto w = a.mutable_unchecked<2>();
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) w(y, x) = m.at(x, y);
    return a;
}

mw::LatentGrid to_latent(const FloatArray& a) {
    if (a.ndim() != 3) throw mw::Error(mw::ErrorKind::Shape, "latent must be a 3-D (C, H, W) array");
    mw::LatentGrid g(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)), static_cast<int>(a.shape(2)));
    std::copy(a.data(), a.data() + a.size(), g.values().begin());
    return g;
}

FloatArray from_latent(const mw::LatentGrid& g) {
    FloatArray a({g.channels(), g.height(), g.width()});
    std::copy(g.values().begin(), g.values().end(), a.mutable_data());
    return a;
}

mw::Matrix to_matrix(const DoubleArray& a) {
    if (a.ndim() != 2) throw mw::Error(mw::ErrorKind::Shape, "matrix must be 2-D");
    mw::Matrix m(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), m.data.begin());
    return m;
}

DoubleArray from_matrix(const mw::Matrix& m) {
    DoubleArray a({m.rows, m.cols});
    std::copy(m.data.begin(), m.data.end(), a.mutable_data());
    return a;
}

mw::PipelineConfig make_config(const std::string& json) {
    mw::PipelineConfig cfg = json.empty() ? mw::PipelineConfig{} : mw::config_from_json(nlohmann::json::parse(json));
    cfg.validate();
    return cfg;
}

std::vector<mw::Direction> to_directions(const std::vector<std::string>& labels) {
    std::vector<mw::Direction> out;
    for (const auto& l : labels) out.push_back(mw::parse_direction(l));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Training-free motion control for text-to-video generation";

    static py::handle error = py::exception<mw::Error>(m, "MotionwarpError").release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const mw::Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error)(py::str(e.what()));
            exc.attr("kind") = mw::to_string(e.kind());
            PyErr_SetObject(error.ptr(), exc.ptr());
        }
    });

    m.def("directions", [] {
        std::vector<std::string> out;
        for (auto d : mw::kAllDirections) out.emplace_back(mw::to_string(d));
        return out;
    });
    m.def("direction_delta", [](const std::string& label, int sigma) {
        const mw::Delta d = mw::direction_to_delta(mw::parse_direction(label), sigma);
        return std::make_pair(d.dx, d.dy);
    }, py::arg("direction"), py::arg("sigma"));

    m.def("shift_mask", [](const BoolArray& mask, int dx, int dy) { return from_mask(mw::shift(to_mask(mask), {dx, dy})); },
          py::arg("mask"), py::arg("dx"), py::arg("dy"));
    m.def("shift_latent", [](const FloatArray& latent, int dx, int dy, bool zero_fill) {
        return from_latent(mw::shift(to_latent(latent), {dx, dy}, zero_fill ? mw::Fill::Zero : mw::Fill::Edge));
    }, py::arg("latent"), py::arg("dx"), py::arg("dy"), py::arg("zero_fill") = false);

    m.def("compose_next_frame",
          [](const FloatArray& prev, const std::vector<BoolArray>& masks, const std::vector<std::pair<int, int>>& deltas,
             const FloatArray& base) {
              std::vector<mw::Mask> ms;
              for (const auto& a : masks) ms.push_back(to_mask(a));
              std::vector<mw::Delta> ds;
              for (const auto& [dx, dy] : deltas) ds.push_back({dx, dy});
              const mw::Composition c = mw::compose_next_frame(to_latent(prev), ms, ds, to_latent(base));
              std::vector<BoolArray> out_masks;
              for (const auto& mk : c.masks) out_masks.push_back(from_mask(mk));
              return py::make_tuple(from_latent(c.latent), out_masks, c.exited);
          },
          py::arg("prev_latent"), py::arg("masks"), py::arg("deltas"), py::arg("base_latent"));

    m.def("fuse", [](const FloatArray& fg, const FloatArray& bg, const BoolArray& mask) {
        return from_latent(mw::fuse_foreground_background(to_latent(fg), to_latent(bg), to_mask(mask)));
    }, py::arg("fg"), py::arg("bg"), py::arg("fg_mask"));

    m.def("iou", [](const BoolArray& a, const BoolArray& b) { return mw::iou(to_mask(a), to_mask(b)); });
    m.def("mask_center", [](const BoolArray& a) {
        const mw::Point p = mw::mask_center(to_mask(a));
        return std::make_pair(p.x, p.y);
    });

    m.def("attention_weights", [](const DoubleArray& q, const DoubleArray& k, int d) {
        return from_matrix(mw::attention_weights(to_matrix(q), to_matrix(k), d));
    }, py::arg("q"), py::arg("k"), py::arg("d"));

    m.def("anchor_schedule",
          [](const std::vector<std::vector<BoolArray>>& frames, const std::vector<std::string>& prompts, double gamma) {
              std::vector<std::vector<mw::Mask>> masks;
              for (const auto& f : frames) {
                  masks.emplace_back();
                  for (const auto& a : f) masks.back().push_back(to_mask(a));
              }
              const auto slices = mw::slice_schedule(prompts, static_cast<int>(frames.size()));
              std::vector<std::pair<int, int>> out;
              for (const auto& e : mw::anchor_schedule(slices, masks, gamma)) out.emplace_back(e.frame, e.anchor);
              return out;
          },
          py::arg("masks"), py::arg("prompts"), py::arg("gamma"));

    m.def("motion_correctness",
          [](const std::vector<BoolArray>& masks, const std::vector<std::string>& plan, int sigma) {
              std::vector<mw::Mask> ms;
              for (const auto& a : masks) ms.push_back(to_mask(a));
              const auto dirs = to_directions(plan);
              return mw::motion_correctness(mw::track_trajectory(ms, "character"), dirs, sigma);
          },
          py::arg("masks"), py::arg("plan"), py::arg("sigma"));

    m.def("parse_motion_plan", [](const std::string& text, int frames) {
        return mw::plan_to_json(mw::parse_motion_plan(text, frames));
    }, py::arg("text"), py::arg("frame_count"));

    m.def("default_config", [] { return mw::config_to_json(mw::PipelineConfig{}).dump(); });

    m.def("generate",
          [](const std::string& prompt, const std::filesystem::path& out_dir, const std::string& config,
             const std::string& plan, const std::vector<std::string>& slices, const std::string& camera) {
              mw::GenerateRequest req;
              req.prompt = prompt;
              req.slices = slices;
              req.out_dir = out_dir;
              if (!plan.empty()) req.plan = mw::plan_from_json(plan);
              if (!camera.empty()) req.camera = camera;
              const mw::PipelineConfig cfg = make_config(config);
              py::gil_scoped_release release;
              return mw::emit_report(mw::run_generation(cfg, req).report);
          },
          py::arg("prompt"), py::arg("out_dir") = std::filesystem::path(), py::arg("config") = "",
          py::arg("plan") = "", py::arg("slices") = std::vector<std::string>{}, py::arg("camera") = "");

    m.def("edit",
          [](const std::filesystem::path& base, const std::filesystem::path& out_dir, const std::string& prompt,
             bool foreground, const std::string& config) {
              mw::EditRequest req{base, foreground ? mw::EditTarget::Foreground : mw::EditTarget::Background, prompt,
                                  out_dir};
              const mw::PipelineConfig cfg = make_config(config);
              py::gil_scoped_release release;
              return mw::run_edit(cfg, req).frames.size();
          },
          py::arg("base_dir"), py::arg("out_dir"), py::arg("prompt"), py::arg("foreground") = false,
          py::arg("config") = "");

    m.def("evaluate", [](const std::filesystem::path& mask_dir, const std::filesystem::path& plan, int sigma) {
        return mw::emit_report(mw::run_eval({mask_dir, plan, sigma}));
    }, py::arg("mask_dir"), py::arg("plan"), py::arg("sigma") = 32);

    m.def("skeleton", [](const std::string& prompt, const std::filesystem::path& out_dir, const std::string& config) {
        const mw::PipelineConfig cfg = make_config(config);
        return mw::run_skeleton(cfg, prompt, out_dir).poses.size();
    }, py::arg("prompt"), py::arg("out_dir"), py::arg("config") = "");
}
