// Copyright (C) 2026 The motionwarp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

namespace motionwarp {

struct UrlParts {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path without trailing slash, may be empty
};

/// Splits "http://host:port/base/" into origin and path prefix.
inline UrlParts split_url(std::string_view url) {
    const auto scheme = url.find("://");
    const std::size_t host_start = scheme == std::string_view::npos ? 0 : scheme + 3;
    const auto slash = url.find('/', host_start);
    UrlParts parts;
    if (slash == std::string_view::npos) {
        parts.origin = std::string(url);
        return parts;
    }
    parts.origin = std::string(url.substr(0, slash));
    parts.prefix = std::string(url.substr(slash));
    while (!parts.prefix.empty() && parts.prefix.back() == '/') parts.prefix.pop_back();
    return parts;
}

}  // namespace motionwarp
