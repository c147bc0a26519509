// Copyright 2026 The evhdr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <sstream>
#include <string>

namespace evhdr {

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

void set_log_level(LogLevel level);
LogLevel log_level();
void log_message(LogLevel level, const std::string& message);

namespace detail {
template <class... Args>
std::string concat(const Args&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}
}  // namespace detail

template <class... Args>
void log_info(const Args&... args) {
  if (log_level() <= LogLevel::info) log_message(LogLevel::info, detail::concat(args...));
}

template <class... Args>
void log_warn(const Args&... args) {
  if (log_level() <= LogLevel::warn) log_message(LogLevel::warn, detail::concat(args...));
}

template <class... Args>
void log_debug(const Args&... args) {
  if (log_level() <= LogLevel::debug) log_message(LogLevel::debug, detail::concat(args...));
}

}  // namespace evhdr
