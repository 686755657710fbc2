#pragma once

// Reference device cards (devices A-D): measured parameter sets used across
// the test and acceptance suites. Frequencies in Hz, times in seconds.
struct DeviceCard {
  const char* name;
  double f_cav;
  double f01;
  double ej;
  double ec;
  double t1;
  double t2e;
  double t2star;
  double chi_abs;
  double kappa;
  double g;
  double eta;
};

inline constexpr DeviceCard kDevices[] = {
    {"A", 20.93e9, 6.85e9, 26.2e9, 0.24e9, 150e-6, 160e-6, 70e-6, 1.43e6, 11.46e6, 556e6, 0.08},
    {"B", 20.91e9, 6.50e9, 21.1e9, 0.25e9, 170e-6, 240e-6, 80e-6, 0.90e6, 13.90e6, 461e6, 0.04},
    {"C", 20.92e9, 5.36e9, 15.4e9, 0.26e9, 270e-6, 275e-6, 100e-6, 0.94e6, 11.28e6, 507e6, 0.08},
    {"D", 20.88e9, 4.77e9, 12.2e9, 0.26e9, 330e-6, 280e-6, 70e-6, 0.83e6, 14.01e6, 510e6, 0.04},
};

inline constexpr DeviceCard kDeviceA = kDevices[0];
inline constexpr DeviceCard kDeviceB = kDevices[1];
inline constexpr DeviceCard kDeviceC = kDevices[2];
inline constexpr DeviceCard kDeviceD = kDevices[3];

inline constexpr double kFittingOffsetCharge = 0.25;
