#pragma once

#include "hspace/numbers.hpp"

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hspace {

/// Thrown when a requested enumeration exceeds its state budget.
class GuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnumerationGuard {
  std::uint64_t max_states = std::uint64_t{1} << 24;

  void check(const BigInt& states, const std::string& what) const {
    if (states > max_states)
      throw GuardExceeded(what + ": " + states.str() + " states exceed the enumeration guard of " +
                          std::to_string(max_states));
  }
};

/// Shard count from HSPACE_SHARDS, else the hardware concurrency.
inline std::size_t default_shard_count() {
  if (const char* env = std::getenv("HSPACE_SHARDS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  const auto hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Splits [0, total) into `shards` contiguous ranges and runs
/// fn(shard, first, last) for each, one thread per shard. The first
/// exception raised by any shard is rethrown after all threads join.
template <class Fn>
void run_sharded(std::uint64_t total, std::size_t shards, Fn&& fn) {
  if (shards == 0) shards = 1;
  if (shards > total && total > 0) shards = static_cast<std::size_t>(total);
  auto bound = [&](std::size_t k) { return static_cast<std::uint64_t>((static_cast<unsigned __int128>(total) * k) / shards); };
  if (shards == 1) {
    fn(std::size_t{0}, std::uint64_t{0}, total);
    return;
  }
  std::vector<std::exception_ptr> errors(shards);
  std::vector<std::thread> workers;
  workers.reserve(shards);
  for (std::size_t k = 0; k < shards; ++k) {
    workers.emplace_back([&, k] {
      try {
        fn(k, bound(k), bound(k + 1));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace hspace
