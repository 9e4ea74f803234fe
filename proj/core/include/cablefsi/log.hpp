#pragma once

#include <spdlog/spdlog.h>

#include <memory>

namespace cablefsi {

/// Shared library logger ("cablefsi"), created on first use. Defaults to the
/// warn level so numerical kernels stay quiet inside tests.
std::shared_ptr<spdlog::logger> logger();

void set_log_level(spdlog::level::level_enum level);

}  // namespace cablefsi
