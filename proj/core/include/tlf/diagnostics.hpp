#pragma once

#include <functional>
#include <string_view>

namespace tlf {

using WarningHandler = std::function<void(std::string_view)>;

/// Installs a process-wide sink for non-fatal warnings and returns the
/// previous one. The default handler writes to stderr.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(std::string_view message);

/// RAII swap of the warning handler, restoring the previous one on exit.
class ScopedWarningHandler {
public:
    explicit ScopedWarningHandler(WarningHandler handler)
        : previous_(set_warning_handler(std::move(handler))) {}
    ~ScopedWarningHandler() { set_warning_handler(std::move(previous_)); }

    ScopedWarningHandler(const ScopedWarningHandler&) = delete;
    ScopedWarningHandler& operator=(const ScopedWarningHandler&) = delete;

private:
    WarningHandler previous_;
};

}  // namespace tlf
