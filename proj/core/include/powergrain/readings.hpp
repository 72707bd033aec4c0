#pragma once

#include <cstdint>
#include <vector>

#include "powergrain/taxonomy.hpp"

namespace powergrain {

/// Base measurement container. Adapters fill a specialisation per trigger;
/// unused members of a specialisation may stay at their defaults.
struct Readings {
  double timestamp = 0.0;   // seconds since epoch
  double time_delta = 0.0;  // seconds since the previous trigger, 0 on first
  virtual ~Readings() = default;
};

struct CPUReadings : Readings {
  double overall_usage = 0.0;                // machine fraction in [0,1]
  std::vector<double> per_socket_power;      // watts; empty when unavailable
  int core_count = 0;
};

struct RAMReadings : Readings {
  std::uint64_t resident_bytes = 0;
  double usage_fraction = 0.0;
};

struct PSUReadings : Readings {
  std::vector<double> psu_power;  // watts, one entry per PSU
};

struct FanReadings : Readings {
  std::vector<double> fan_rpm;
};

struct InstructionReadings : Readings {
  InstructionHistogram histogram;
  double classified_sample_weight = 0.0;  // weight that landed in model buckets
};

}  // namespace powergrain
