#pragma once

#include <utility>

#include <spdlog/spdlog.h>

namespace katflow::log {

/// Library logger.  Level from KATFLOW_LOG (error, info, trace; default error).
spdlog::logger& logger();

template <class... Args>
void info(fmt::format_string<Args...> fmt, Args&&... args) {
    logger().info(fmt, std::forward<Args>(args)...);
}

template <class... Args>
void trace(fmt::format_string<Args...> fmt, Args&&... args) {
    logger().trace(fmt, std::forward<Args>(args)...);
}

template <class... Args>
void error(fmt::format_string<Args...> fmt, Args&&... args) {
    logger().error(fmt, std::forward<Args>(args)...);
}

}  // namespace katflow::log
