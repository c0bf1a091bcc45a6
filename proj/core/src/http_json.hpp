#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "ipts/error.hpp"

namespace ipts::detail {

/// Connection-level failure; callers may retry these.
class TransportError : public Error {
public:
    using Error::Error;
};

/// POSTs `body` to base_url + path and parses the JSON reply. Non-200
/// statuses and malformed replies raise Error; transport failures raise
/// TransportError.
nlohmann::json post_json(const std::string& module, const std::string& base_url, const std::string& path,
                         const nlohmann::json& body, int timeout_seconds);

std::string trim_url(std::string url);

}  // namespace ipts::detail
