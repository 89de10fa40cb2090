#pragma once

#include <optional>
#include <string>

namespace fakecti::detail
{

struct HttpResponse
{
    int status = 0;
    std::string body;
};

struct Url
{
    std::string scheme_host_port; // "http://host:port"
    std::string path;             // "/v1/chat/completions"
};

/// Throws Error(InvalidSpec) for URLs without an http(s) scheme.
Url split_url(const std::string& url);

/// Throws Error(TransportFailure) when no response arrives (connection
/// refused, timeout, TLS failure).
HttpResponse http_post_json(const std::string& url, const std::string& body,
                            const std::optional<std::string>& bearer, double timeout_seconds);
HttpResponse http_get(const std::string& url, double timeout_seconds);

std::optional<std::string> env(const char* name);

} // namespace fakecti::detail
