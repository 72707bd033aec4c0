#include "powergrain/rapl.hpp"

#include <algorithm>
#include <fstream>

#include "powergrain/error.hpp"

namespace powergrain {

namespace {

std::string read_trimmed(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw SourceUnavailable("cannot open " + p.string());
  std::string s;
  std::getline(in, s);
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) {
    s.pop_back();
  }
  return s;
}

std::int64_t read_int(const std::filesystem::path& p) {
  const std::string s = read_trimmed(p);
  try {
    return std::stoll(s);
  } catch (const std::exception&) {
    throw ParseFailure("not an integer in " + p.string() + ": '" + s + "'");
  }
}

}  // namespace

double accumulate_rapl(std::int64_t prev_uj, std::int64_t curr_uj,
                       std::int64_t max_range_uj, double dt_seconds) {
  if (max_range_uj <= 0) {
    throw InvalidRange("max_energy_range_uj must be positive, got " +
                       std::to_string(max_range_uj));
  }
  if (prev_uj < 0 || curr_uj < 0 || prev_uj > max_range_uj ||
      curr_uj > max_range_uj) {
    throw DomainError("energy counter outside [0, max_range]");
  }
  if (dt_seconds <= 0.0) {
    throw DomainError("dt must be positive");
  }
  const std::int64_t delta_uj = curr_uj >= prev_uj
                                    ? curr_uj - prev_uj
                                    : (max_range_uj - prev_uj) + curr_uj;
  return static_cast<double>(delta_uj) / dt_seconds / 1e6;
}

RaplObserver::RaplObserver(RaplConfig config, Clock clock)
    : Observer(ObserverScope::system(), std::move(clock)) {
  const auto& root = config.powercap_root;
  if (!std::filesystem::is_directory(root)) {
    throw SourceUnavailable("no powercap hierarchy at " + root.string());
  }
  std::vector<std::filesystem::path> package_dirs;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    const std::string dir_name = entry.path().filename().string();
    if (dir_name.rfind("intel-rapl:", 0) != 0) continue;
    if (dir_name.find(':') != dir_name.rfind(':')) continue;  // skip subdomains
    const auto name_file = entry.path() / "name";
    if (!std::filesystem::exists(name_file)) continue;
    if (read_trimmed(name_file).rfind("package", 0) != 0) continue;
    package_dirs.push_back(entry.path());
  }
  std::sort(package_dirs.begin(), package_dirs.end());
  for (const auto& dir : package_dirs) {
    Domain d;
    d.energy_file = dir / "energy_uj";
    d.max_range_uj = read_int(dir / "max_energy_range_uj");
    domains_.push_back(std::move(d));
  }
  if (domains_.empty()) {
    throw SourceUnavailable("no package domains under " + root.string());
  }
}

void RaplObserver::trigger() {
  const auto [now, delta] = advance_clock();

  std::vector<std::int64_t> current;
  current.reserve(domains_.size());
  for (const auto& d : domains_) {
    current.push_back(read_int(d.energy_file));
  }

  cpu_.per_socket_power.clear();
  if (has_prev_ && delta > 0.0) {
    for (std::size_t i = 0; i < domains_.size(); ++i) {
      cpu_.per_socket_power.push_back(
          accumulate_rapl(domains_[i].last_uj, current[i],
                          domains_[i].max_range_uj, delta));
    }
  }
  for (std::size_t i = 0; i < domains_.size(); ++i) {
    domains_[i].last_uj = current[i];
  }
  has_prev_ = true;
  cpu_.timestamp = now;
  cpu_.time_delta = delta;
  mark_triggered();
}

std::vector<Readings*> RaplObserver::readings_views() { return {&cpu_}; }

}  // namespace powergrain
