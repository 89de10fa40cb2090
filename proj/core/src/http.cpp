#include "http.hpp"

#include <cmath>
#include <cstdlib>

#include <httplib.h>

#include "fakecti/error.hpp"

namespace fakecti::detail
{

Url split_url(const std::string& url)
{
    auto scheme = url.find("://");
    if (scheme == std::string::npos)
        throw Error(ErrorCode::InvalidSpec, "URL without scheme: " + url);
    const auto proto = url.substr(0, scheme);
    if (proto != "http" && proto != "https")
        throw Error(ErrorCode::InvalidSpec, "unsupported URL scheme: " + url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (proto == "https")
        throw Error(ErrorCode::InvalidSpec, "built without TLS support: " + url);
#endif
    auto slash = url.find('/', scheme + 3);
    Url out;
    out.scheme_host_port = url.substr(0, slash);
    out.path = slash == std::string::npos ? "/" : url.substr(slash);
    if (out.scheme_host_port.size() <= scheme + 3)
        throw Error(ErrorCode::InvalidSpec, "URL without host: " + url);
    return out;
}

namespace
{

void configure(httplib::Client& client, double timeout_seconds)
{
    const auto secs = static_cast<time_t>(std::floor(timeout_seconds));
    const auto usecs = static_cast<time_t>((timeout_seconds - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    client.set_follow_location(true);
}

HttpResponse finish(const httplib::Result& result, const std::string& url)
{
    if (!result)
        throw Error(ErrorCode::TransportFailure, url + ": " + httplib::to_string(result.error()));
    return HttpResponse{result->status, result->body};
}

} // namespace

HttpResponse http_post_json(const std::string& url, const std::string& body,
                            const std::optional<std::string>& bearer, double timeout_seconds)
{
    const auto parts = split_url(url);
    httplib::Client client(parts.scheme_host_port);
    configure(client, timeout_seconds);
    httplib::Headers headers;
    if (bearer && !bearer->empty())
        headers.emplace("Authorization", "Bearer " + *bearer);
    return finish(client.Post(parts.path, headers, body, "application/json"), url);
}

HttpResponse http_get(const std::string& url, double timeout_seconds)
{
    const auto parts = split_url(url);
    httplib::Client client(parts.scheme_host_port);
    configure(client, timeout_seconds);
    return finish(client.Get(parts.path), url);
}

std::optional<std::string> env(const char* name)
{
    const char* value = std::getenv(name);
    if (value == nullptr || *value == '\0')
        return std::nullopt;
    return std::string(value);
}

} // namespace fakecti::detail
