#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace fpot {

inline constexpr const char* kVersion = "1.0.0";

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kEulerGamma = 0.577215664901532860606512090082402431;

// beta = infinity means ground state; all microscopic engines require it.
inline constexpr double kBetaInfinite = std::numeric_limits<double>::infinity();

inline bool is_infinite_beta(double beta) { return std::isinf(beta) && beta > 0; }

// Error taxonomy maps 1:1 onto CLI exit codes (config=2, numerical=3, io=4).
struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

struct io_error : std::runtime_error {
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fpot
