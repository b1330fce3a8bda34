// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace motionwarp {

class LlmProvider {
public:
    virtual ~LlmProvider() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

/// Key under which a prompt's transcript is stored: 16 hex digits of the
/// FNV-1a hash of the exact prompt bytes.
std::string transcript_key(std::string_view prompt);

/// Serves canned answers from a directory holding `<key>.request.txt` /
/// `<key>.response.txt` pairs.
class ReplayProvider final : public LlmProvider {
public:
    explicit ReplayProvider(std::filesystem::path dir);

    std::string complete(const std::string& prompt) override;

    /// Writes a request/response pair into `dir`.
    static void record(const std::filesystem::path& dir, const std::string& prompt, const std::string& response);

private:
    std::filesystem::path m_dir;
};

/// OpenAI-style chat completion over plain HTTP:
/// POST <base>/v1/chat/completions {"model", "messages": [{"role":"user","content"}]}
/// and reads choices[0].message.content.
class HttpChatProvider final : public LlmProvider {
public:
    HttpChatProvider(std::string base_url, std::string model, int timeout_seconds = 60);

    std::string complete(const std::string& prompt) override;

private:
    std::string m_base_url;
    std::string m_model;
    int m_timeout;
};

}  // namespace motionwarp
