#include "subseg/threads.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <thread>

namespace subseg {

std::size_t worker_count() {
  std::size_t requested = 0;
  if (const char* env = std::getenv("SUBSEG_THREADS")) {
    std::size_t value = 0;
    const auto* end = env + std::strlen(env);
    if (auto [ptr, ec] = std::from_chars(env, end, value); ec == std::errc() && ptr == end)
      requested = value;
  }
  if (requested == 0)
    requested = std::thread::hardware_concurrency();
  return requested == 0 ? 1 : requested;
}

}  // namespace subseg
