// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#include "motionwarp/llm.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "motionwarp/error.hpp"
#include "motionwarp/http_util.hpp"
#include "motionwarp/image_io.hpp"
#include "motionwarp/wire.hpp"

namespace motionwarp {

std::string transcript_key(std::string_view prompt) { return wire::hex64(wire::fnv1a64(prompt)); }

ReplayProvider::ReplayProvider(std::filesystem::path dir) : m_dir(std::move(dir)) {
    if (!std::filesystem::is_directory(m_dir)) {
        throw Error(ErrorKind::NotFound, "replay directory '" + m_dir.string() + "' does not exist");
    }
}

std::string ReplayProvider::complete(const std::string& prompt) {
    const std::string key = transcript_key(prompt);
    const auto response = m_dir / (key + ".response.txt");
    if (!std::filesystem::exists(response)) {
        throw Error(ErrorKind::NotFound, "no recorded transcript " + key + " in '" + m_dir.string() + "'");
    }
    const auto request = m_dir / (key + ".request.txt");
    if (std::filesystem::exists(request) && read_text(request) != prompt) {
        throw Error(ErrorKind::State, "transcript " + key + " was recorded for a different prompt");
    }
    return read_text(response);
}

void ReplayProvider::record(const std::filesystem::path& dir, const std::string& prompt, const std::string& response) {
    std::filesystem::create_directories(dir);
    const std::string key = transcript_key(prompt);
    write_text(dir / (key + ".request.txt"), prompt);
    write_text(dir / (key + ".response.txt"), response);
}

HttpChatProvider::HttpChatProvider(std::string base_url, std::string model, int timeout_seconds)
    : m_base_url(std::move(base_url)), m_model(std::move(model)), m_timeout(timeout_seconds) {}

std::string HttpChatProvider::complete(const std::string& prompt) {
    const auto endpoint = split_url(m_base_url);
    httplib::Client client(endpoint.origin);
    client.set_connection_timeout(m_timeout, 0);
    client.set_read_timeout(m_timeout, 0);

    nlohmann::json body = {
        {"model", m_model},
        {"temperature", 0},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
    };
    const std::string path = endpoint.prefix + "/v1/chat/completions";
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) {
        throw BackendError(path, "request failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw BackendError(path, "HTTP " + std::to_string(res->status));
    }
    try {
        const auto doc = nlohmann::json::parse(res->body);
        return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(path, std::string("malformed completion: ") + e.what());
    }
}

}  // namespace motionwarp
