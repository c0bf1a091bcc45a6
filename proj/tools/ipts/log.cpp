#include "log.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

namespace ipts::cli {
namespace {

bool g_json = false;

std::shared_ptr<spdlog::logger> logger() {
    static auto instance = [] {
        auto l = spdlog::stderr_logger_mt("ipts");
        l->set_pattern("[%l] %v");
        return l;
    }();
    return instance;
}

std::string render(const std::string& message) { return g_json ? nlohmann::json(message).dump() : message; }

}  // namespace

void configure_logging(bool json, bool quiet) {
    g_json = json;
    auto l = logger();
    l->set_pattern(json ? R"({"time":"%Y-%m-%dT%H:%M:%S.%e%z","level":"%l","msg":%v})" : "[%l] %v");
    l->set_level(quiet ? spdlog::level::warn : spdlog::level::info);
}

void log_info(const std::string& message) { logger()->info(render(message)); }
void log_warn(const std::string& message) { logger()->warn(render(message)); }

}  // namespace ipts::cli
