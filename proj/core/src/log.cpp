// Copyright 2026 The regionopt Authors.
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

#include "regionopt/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace regionopt::log {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

Sink& current_sink() {
  static Sink sink = [](Level lvl, const std::string& msg) {
    static constexpr const char* kNames[] = {"debug", "info", "warning", "error"};
    std::cerr << "[regionopt " << kNames[static_cast<int>(lvl)] << "] " << msg << '\n';
  };
  return sink;
}

std::atomic<Level> g_level{Level::kWarning};

void emit(Level lvl, const std::string& message) {
  if (lvl < g_level.load()) return;
  std::lock_guard lock(sink_mutex());
  if (current_sink()) current_sink()(lvl, message);
}

}  // namespace

void set_sink(Sink sink) {
  std::lock_guard lock(sink_mutex());
  current_sink() = std::move(sink);
}

void set_level(Level lvl) { g_level.store(lvl); }
Level level() { return g_level.load(); }

void debug(const std::string& message) { emit(Level::kDebug, message); }
void info(const std::string& message) { emit(Level::kInfo, message); }
void warning(const std::string& message) { emit(Level::kWarning, message); }
void error(const std::string& message) { emit(Level::kError, message); }

}  // namespace regionopt::log
