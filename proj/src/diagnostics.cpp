#include "flowbasis/diagnostics.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace flowbasis {
namespace {

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& handler() {
  static WarningHandler h;
  return h;
}

}  // namespace

void set_warning_handler(WarningHandler h) {
  std::lock_guard lock(handler_mutex());
  handler() = std::move(h);
}

void warn(std::string_view message) {
  std::lock_guard lock(handler_mutex());
  if (handler()) {
    handler()(message);
  } else {
    std::clog << "flowbasis warning: " << message << '\n';
  }
}

}  // namespace flowbasis
