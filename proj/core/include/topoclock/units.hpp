#pragma once

#include <numbers>

namespace topoclock {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Config files speak Hz; everything inside the library is rad/s.
constexpr double hz_to_angular(double hz) { return kTwoPi * hz; }
constexpr double angular_to_hz(double omega) { return omega / kTwoPi; }

}  // namespace topoclock
