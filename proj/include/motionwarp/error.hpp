// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace motionwarp {

enum class ErrorKind {
    Usage,
    Parse,
    Vocabulary,
    Schema,
    Range,
    Shape,
    NotFound,
    EmptyMask,
    Backend,
    State,
    Capacity,
    SceneCompile,
    UndefinedMetric,
    Precondition,
};

const char* to_string(ErrorKind kind);

/// Base for every failure raised by the library. `kind()` lets callers map
/// failures onto exit codes or fallbacks without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), m_kind(kind) {}

    ErrorKind kind() const noexcept { return m_kind; }

private:
    ErrorKind m_kind;
};

class ParseError : public Error {
public:
    ParseError(std::size_t offset, const std::string& message)
        : Error(ErrorKind::Parse, message + " (at byte " + std::to_string(offset) + ")"),
          m_offset(offset) {}

    std::size_t offset() const noexcept { return m_offset; }

private:
    std::size_t m_offset;
};

class VocabularyError : public Error {
public:
    explicit VocabularyError(const std::string& token)
        : Error(ErrorKind::Vocabulary, "unknown direction '" + token + "'"), m_token(token) {}

    const std::string& token() const noexcept { return m_token; }

private:
    std::string m_token;
};

/// Raised by backends; carries the endpoint (or provider name) that failed.
class BackendError : public Error {
public:
    BackendError(const std::string& endpoint, const std::string& message)
        : Error(ErrorKind::Backend, endpoint + ": " + message), m_endpoint(endpoint) {}

    const std::string& endpoint() const noexcept { return m_endpoint; }

private:
    std::string m_endpoint;
};

}  // namespace motionwarp
