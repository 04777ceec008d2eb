#pragma once

#include <functional>
#include <string_view>

namespace flowbasis {

using WarningHandler = std::function<void(std::string_view)>;

// Warnings go to std::clog unless a handler is installed. Passing an empty
// handler restores the default.
void set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace flowbasis
