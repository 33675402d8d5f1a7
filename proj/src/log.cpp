#include "katflow/log.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>

namespace katflow::log {

spdlog::logger& logger() {
    static const std::shared_ptr<spdlog::logger> instance = [] {
        auto l = spdlog::stderr_color_mt("katflow");
        const char* env = std::getenv("KATFLOW_LOG");
        const std::string level = env ? env : "error";
        l->set_level(level == "trace" ? spdlog::level::trace
                     : level == "info" ? spdlog::level::info
                                       : spdlog::level::err);
        return l;
    }();
    return *instance;
}

}  // namespace katflow::log
