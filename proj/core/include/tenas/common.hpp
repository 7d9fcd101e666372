#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>
#include <string>
#include <string_view>

namespace tenas {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: malformed configs, unknown operator names, bad files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Tensor or layer shape mismatch. The message names the offending layer.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A function argument outside its documented domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A library invariant was violated. Indicates a bug, not bad input.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Platform-independent hashing for seed derivation. std::hash is not stable
// across standard libraries, so seeds are derived with splitmix64 + FNV-1a.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Incrementally mixes integers and strings into a 64-bit seed.
class SeedHasher {
 public:
  SeedHasher() = default;
  explicit SeedHasher(std::uint64_t base) { add(base); }

  SeedHasher& add(std::uint64_t value) noexcept {
    state_ = splitmix64(state_ ^ splitmix64(value + 0x632be59bd9b4e019ULL));
    return *this;
  }
  SeedHasher& add(std::string_view text) noexcept { return add(fnv1a64(text)); }

  [[nodiscard]] std::uint64_t value() const noexcept { return state_; }

 private:
  std::uint64_t state_ = 0x6a09e667f3bcc908ULL;
};

template <typename... Parts>
std::uint64_t stable_hash(const Parts&... parts) {
  SeedHasher h;
  (h.add(parts), ...);
  return h.value();
}

/// Runs `fn(i)` for every i in [0, count) on up to `jobs` threads. Callers
/// write results into pre-sized slots indexed by i, so the outcome does not
/// depend on scheduling. The first exception thrown is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < jobs; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace tenas
