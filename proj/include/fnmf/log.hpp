#pragma once

#include <functional>
#include <string_view>

namespace fnmf {

using WarningHandler = std::function<void(std::string_view)>;

// Installs a process-wide sink for library warnings and returns the previous one.
// The default handler writes to std::cerr.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(std::string_view message);

} // namespace fnmf
