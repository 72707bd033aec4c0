#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <utility>

#include "powergrain/observer.hpp"

namespace powergrain {

/// One `/proc/<pid>/stat` snapshot: cumulative user+kernel jiffies and the
/// resident set size in pages.
struct PidStatSnapshot {
  std::uint64_t process_jiffies = 0;
  std::int64_t rss_pages = 0;
};

/// One `/proc/stat` snapshot: cumulative jiffies summed over all CPUs.
struct SystemStatSnapshot {
  std::uint64_t total_jiffies = 0;
  std::uint64_t idle_jiffies = 0;  // idle + iowait
  int core_count = 0;              // number of cpuN lines
};

struct MeminfoSnapshot {
  std::uint64_t total_bytes = 0;
  std::uint64_t available_bytes = 0;
};

PidStatSnapshot parse_pid_stat(std::string_view text);
SystemStatSnapshot parse_system_stat(std::string_view text);
MeminfoSnapshot parse_meminfo(std::string_view text);

struct ProcStatReadings {
  CPUReadings cpu;
  RAMReadings ram;
};

/// Pure form of the procfs adapter's trigger arithmetic, over snapshot
/// pairs: overall_usage = delta(process jiffies) / delta(total jiffies),
/// clamped to [0,1] and 0 on a degenerate window; resident_bytes = RSS of
/// the after-snapshot times page_size.
ProcStatReadings parse_proc_stat(std::string_view process_stat_before,
                                 std::string_view process_stat_after,
                                 std::string_view system_stat_before,
                                 std::string_view system_stat_after,
                                 int core_count, std::uint64_t page_size);

struct ProcfsConfig {
  std::filesystem::path root = "/proc";
  std::uint64_t page_size = 4096;
};

/// Adapter over /proc. Process scope reads <root>/<pid>/stat and <root>/stat;
/// system scope reads <root>/stat and <root>/meminfo. Readings layout:
/// [CPUReadings, RAMReadings].
class ProcStatObserver : public Observer {
 public:
  explicit ProcStatObserver(ObserverScope scope, ProcfsConfig config = {},
                            Clock clock = wall_clock());

  void trigger() override;

 protected:
  std::vector<Readings*> readings_views() override;

 private:
  ProcfsConfig config_;
  CPUReadings cpu_;
  RAMReadings ram_;
  bool has_prev_ = false;
  PidStatSnapshot prev_pid_;
  SystemStatSnapshot prev_sys_;
};

}  // namespace powergrain
