#ifndef SUBDIFF_COMMON_HPP
#define SUBDIFF_COMMON_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace subdiff {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

enum class ErrorCode {
  invalid_argument = 1,
  dimension_mismatch = 2,
  unsupported = 3,
  io = 4,
  config = 5,
  unavailable = 6,
  internal = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

inline void require_dim(Eigen::Index got, Eigen::Index want, const char* where) {
  if (got != want)
    fail(ErrorCode::dimension_mismatch, std::string(where) + ": dimension " + std::to_string(got) +
                                            " does not match " + std::to_string(want));
}

// splitmix64 finalizer; used to derive independent stream seeds from a master seed.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) noexcept {
  return mix64(mix64(mix64(master) ^ (a * 0xD1B54A32D192ED03ull)) ^ (b * 0x8CB92BA72F3D8DD7ull));
}

}  // namespace subdiff

#endif
