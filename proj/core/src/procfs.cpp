#include "powergrain/procfs.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "powergrain/error.hpp"

namespace powergrain {

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw SourceUnavailable("cannot open " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

PidStatSnapshot parse_pid_stat(std::string_view text) {
  // Field 2 (comm) may contain spaces and parentheses; everything after the
  // last ')' is whitespace-separated. utime/stime are fields 14/15 and rss is
  // field 24 in 1-based /proc/<pid>/stat numbering.
  const auto close = text.rfind(')');
  if (close == std::string_view::npos) {
    throw ParseFailure("pid stat: missing comm field");
  }
  std::istringstream rest{std::string(text.substr(close + 1))};
  std::string tok;
  std::uint64_t utime = 0, stime = 0;
  std::int64_t rss = -1;
  // after ')' the next token is field 3 (state)
  for (int field = 3; rest >> tok; ++field) {
    try {
      if (field == 14) utime = std::stoull(tok);
      if (field == 15) stime = std::stoull(tok);
      if (field == 24) {
        rss = std::stoll(tok);
        break;
      }
    } catch (const std::exception&) {
      throw ParseFailure("pid stat: field " + std::to_string(field) +
                         " is not numeric: '" + tok + "'");
    }
  }
  if (rss < 0) throw ParseFailure("pid stat: too few fields");
  return {utime + stime, rss};
}

SystemStatSnapshot parse_system_stat(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  SystemStatSnapshot snap;
  bool have_cpu_line = false;
  while (std::getline(in, line)) {
    if (line.rfind("cpu", 0) != 0) continue;
    std::istringstream ls(line);
    std::string label;
    ls >> label;
    if (label == "cpu") {
      // user nice system idle iowait irq softirq steal [guest guest_nice]
      // guest time is already included in user, so sum the first eight.
      std::uint64_t v[8] = {};
      for (int i = 0; i < 8 && (ls >> v[i]); ++i) {
      }
      snap.total_jiffies = 0;
      for (std::uint64_t x : v) snap.total_jiffies += x;
      snap.idle_jiffies = v[3] + v[4];
      have_cpu_line = true;
    } else {
      ++snap.core_count;
    }
  }
  if (!have_cpu_line) throw ParseFailure("system stat: no aggregate cpu line");
  return snap;
}

MeminfoSnapshot parse_meminfo(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string key;
  std::uint64_t value = 0;
  std::string unit;
  MeminfoSnapshot snap;
  bool have_total = false;
  while (in >> key >> value) {
    std::getline(in, unit);
    if (key == "MemTotal:") {
      snap.total_bytes = value * 1024;
      have_total = true;
    } else if (key == "MemAvailable:") {
      snap.available_bytes = value * 1024;
    }
  }
  if (!have_total) throw ParseFailure("meminfo: missing MemTotal");
  return snap;
}

ProcStatReadings parse_proc_stat(std::string_view process_stat_before,
                                 std::string_view process_stat_after,
                                 std::string_view system_stat_before,
                                 std::string_view system_stat_after,
                                 int core_count, std::uint64_t page_size) {
  const PidStatSnapshot pb = parse_pid_stat(process_stat_before);
  const PidStatSnapshot pa = parse_pid_stat(process_stat_after);
  const SystemStatSnapshot sb = parse_system_stat(system_stat_before);
  const SystemStatSnapshot sa = parse_system_stat(system_stat_after);

  const std::uint64_t dproc =
      pa.process_jiffies >= pb.process_jiffies
          ? pa.process_jiffies - pb.process_jiffies
          : 0;
  const std::uint64_t dtotal =
      sa.total_jiffies >= sb.total_jiffies ? sa.total_jiffies - sb.total_jiffies
                                           : 0;

  ProcStatReadings out;
  out.cpu.overall_usage =
      dtotal == 0 ? 0.0
                  : clamp01(static_cast<double>(dproc) / static_cast<double>(dtotal));
  out.cpu.core_count = core_count;
  out.ram.resident_bytes = static_cast<std::uint64_t>(pa.rss_pages) * page_size;
  return out;
}

ProcStatObserver::ProcStatObserver(ObserverScope scope, ProcfsConfig config,
                                   Clock clock)
    : Observer(scope, std::move(clock)), config_(std::move(config)) {
  if (!std::filesystem::exists(config_.root / "stat")) {
    throw SourceUnavailable("no stat file under " + config_.root.string());
  }
}

void ProcStatObserver::trigger() {
  const auto [now, delta] = advance_clock();

  const std::string sys_text = read_file(config_.root / "stat");
  SystemStatSnapshot sys;
  PidStatSnapshot pid_snap;
  sys = parse_system_stat(sys_text);

  if (scope().is_process()) {
    const std::string pid_text =
        read_file(config_.root / std::to_string(scope().pid) / "stat");
    pid_snap = parse_pid_stat(pid_text);
  }

  CPUReadings cpu;
  RAMReadings ram;
  cpu.core_count = sys.core_count;

  if (has_prev_) {
    const std::uint64_t dtotal = sys.total_jiffies - prev_sys_.total_jiffies;
    if (scope().is_process()) {
      const std::uint64_t dproc = pid_snap.process_jiffies - prev_pid_.process_jiffies;
      cpu.overall_usage =
          dtotal == 0
              ? 0.0
              : clamp01(static_cast<double>(dproc) / static_cast<double>(dtotal));
    } else {
      const std::uint64_t didle = sys.idle_jiffies - prev_sys_.idle_jiffies;
      cpu.overall_usage =
          dtotal == 0
              ? 0.0
              : clamp01(1.0 - static_cast<double>(didle) / static_cast<double>(dtotal));
    }
  }

  if (scope().is_process()) {
    ram.resident_bytes =
        static_cast<std::uint64_t>(pid_snap.rss_pages) * config_.page_size;
    if (std::filesystem::exists(config_.root / "meminfo")) {
      const MeminfoSnapshot mem = parse_meminfo(read_file(config_.root / "meminfo"));
      if (mem.total_bytes > 0) {
        ram.usage_fraction =
            clamp01(static_cast<double>(ram.resident_bytes) /
                    static_cast<double>(mem.total_bytes));
      }
    }
  } else {
    const MeminfoSnapshot mem = parse_meminfo(read_file(config_.root / "meminfo"));
    const std::uint64_t used = mem.total_bytes - std::min(mem.available_bytes, mem.total_bytes);
    ram.resident_bytes = used;
    if (mem.total_bytes > 0) {
      ram.usage_fraction = clamp01(static_cast<double>(used) /
                                   static_cast<double>(mem.total_bytes));
    }
  }

  cpu.timestamp = now;
  cpu.time_delta = delta;
  ram.timestamp = now;
  ram.time_delta = delta;

  prev_sys_ = sys;
  prev_pid_ = pid_snap;
  has_prev_ = true;
  cpu_ = cpu;
  ram_ = ram;
  mark_triggered();
}

std::vector<Readings*> ProcStatObserver::readings_views() {
  return {&cpu_, &ram_};
}

}  // namespace powergrain
