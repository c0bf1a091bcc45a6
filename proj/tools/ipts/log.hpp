#pragma once

#include <string>

#include <fmt/format.h>

namespace ipts::cli {

/// Plain "[level] message" lines, or one JSON object per line.
void configure_logging(bool json, bool quiet = false);

void log_info(const std::string& message);
void log_warn(const std::string& message);

template <typename... Args>
void info(fmt::format_string<Args...> f, Args&&... args) {
    log_info(fmt::format(f, std::forward<Args>(args)...));
}

template <typename... Args>
void warn(fmt::format_string<Args...> f, Args&&... args) {
    log_warn(fmt::format(f, std::forward<Args>(args)...));
}

}  // namespace ipts::cli
