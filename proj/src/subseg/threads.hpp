#pragma once

#include <cstddef>

namespace subseg {

/// Worker count for internal parallelism: SUBSEG_THREADS when set and positive,
/// otherwise the hardware concurrency (0 means auto).
std::size_t worker_count();

}  // namespace subseg
