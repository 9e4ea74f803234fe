#include "cablefsi/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>

namespace cablefsi {

std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    auto existing = spdlog::get("cablefsi");
    if (existing) return existing;
    auto created = spdlog::stderr_color_mt("cablefsi");
    created->set_level(spdlog::level::warn);
    created->set_pattern("[%l] %v");
    return created;
  }();
  return instance;
}

void set_log_level(spdlog::level::level_enum level) { logger()->set_level(level); }

}  // namespace cablefsi
