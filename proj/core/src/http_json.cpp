#include "http_json.hpp"

#include <fmt/format.h>
#include <httplib.h>

namespace ipts::detail {

nlohmann::json post_json(const std::string& module, const std::string& base_url, const std::string& path,
                         const nlohmann::json& body, int timeout_seconds) {
    httplib::Client client(base_url);
    client.set_connection_timeout(timeout_seconds, 0);
    client.set_read_timeout(timeout_seconds, 0);
    client.set_write_timeout(timeout_seconds, 0);
    const auto res = client.Post(path, body.dump(), "application/json");
    if (!res)
        throw TransportError(module,
                             fmt::format("transport error contacting {}: {}", base_url, httplib::to_string(res.error())));
    if (res->status != 200) throw Error(module, fmt::format("{}{} returned HTTP {}", base_url, path, res->status));
    try {
        return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error&) {
        throw Error(module, fmt::format("{}{} returned malformed JSON", base_url, path));
    }
}

std::string trim_url(std::string url) {
    while (!url.empty() && url.back() == '/') url.pop_back();
    return url;
}

}  // namespace ipts::detail
