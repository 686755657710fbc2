#pragma once

// CODATA 2018 exact values (SI redefinition).
namespace hfcqed::constants {

inline constexpr double planck = 6.62607015e-34;       // J s
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double boltzmann = 1.380649e-23;      // J / K
inline constexpr double speed_of_light = 299792458.0;  // m / s
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

}  // namespace hfcqed::constants
