#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "powergrain/observer.hpp"

namespace powergrain {

/// Power reconstructed from a pair of cumulative RAPL energy counters,
/// handling a single counter wraparound. Throws InvalidRange when
/// max_range_uj is not positive and DomainError on out-of-range inputs.
double accumulate_rapl(std::int64_t prev_uj, std::int64_t curr_uj,
                       std::int64_t max_range_uj, double dt_seconds);

struct RaplConfig {
  std::filesystem::path powercap_root = "/sys/class/powercap";
};

/// Adapter over the powercap sysfs hierarchy. Scans intel-rapl:<n> package
/// domains at construction; each trigger reads every energy_uj counter and
/// derives per-socket watts from the previous trigger. Readings layout:
/// [CPUReadings] with per_socket_power filled (empty on the first trigger,
/// which has no predecessor to difference against).
class RaplObserver : public Observer {
 public:
  explicit RaplObserver(RaplConfig config = {}, Clock clock = wall_clock());

  void trigger() override;

  std::size_t socket_count() const { return domains_.size(); }

 protected:
  std::vector<Readings*> readings_views() override;

 private:
  struct Domain {
    std::filesystem::path energy_file;
    std::int64_t max_range_uj = 0;
    std::int64_t last_uj = 0;
  };

  std::vector<Domain> domains_;
  CPUReadings cpu_;
  bool has_prev_ = false;
};

}  // namespace powergrain
