#pragma once

#include <stdexcept>
#include <string>

namespace ipts {

/// Error raised by every module. Carries the module name and an optional
/// context string (line number, document id, phrase) so the CLI can emit a
/// machine-readable error record.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& message, std::string context = {})
        : std::runtime_error(message), module_(std::move(module)), context_(std::move(context)) {}

    const std::string& module() const noexcept { return module_; }
    const std::string& context() const noexcept { return context_; }

private:
    std::string module_;
    std::string context_;
};

}  // namespace ipts
