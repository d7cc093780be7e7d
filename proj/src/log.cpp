// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#include <iostream>
#include <mutex>
#include <utility>

#include "streamcc/error.hpp"

namespace streamcc::log {

namespace {

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

Sink& current_sink() {
    static Sink sink = [](const std::string& message) {
        std::cerr << "warning: " << message << '\n';
    };
    return sink;
}

}  // namespace

Sink set_warning_sink(Sink sink) {
    std::lock_guard lock(sink_mutex());
    return std::exchange(current_sink(), std::move(sink));
}

void warn(const std::string& message) {
    std::lock_guard lock(sink_mutex());
    if (current_sink()) current_sink()(message);
}

}  // namespace streamcc::log
