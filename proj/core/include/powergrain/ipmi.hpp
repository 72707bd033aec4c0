#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "powergrain/observer.hpp"

namespace powergrain {

struct IpmiSensorReadings {
  PSUReadings psu;
  FanReadings fans;
};

/// Parses the pipe-delimited `sensor | value | unit | status` layout of
/// common IPMI listing tools. Watt rows whose sensor name looks like a PSU
/// fill psu_power in row order; RPM rows fill fan_rpm; "na" values are
/// skipped. Throws ParseFailure when no usable row is found.
IpmiSensorReadings parse_ipmi_sensors(std::string_view sensor_text);

/// Adapter over an IPMI sensor listing. The text source is injectable: a
/// fixture file for tests, a tool invocation on live hosts. Readings layout:
/// [FanReadings, PSUReadings].
class IpmiObserver : public Observer {
 public:
  using TextSource = std::function<std::string()>;

  explicit IpmiObserver(TextSource source, Clock clock = wall_clock());

  static IpmiObserver from_file(const std::filesystem::path& fixture,
                                Clock clock = wall_clock());
  /// Runs `command` and captures stdout on every trigger (live hosts,
  /// best-effort). Throws SourceUnavailable when the command cannot run.
  static IpmiObserver from_command(std::string command, Clock clock = wall_clock());

  void trigger() override;

 protected:
  std::vector<Readings*> readings_views() override;

 private:
  TextSource source_;
  FanReadings fans_;
  PSUReadings psu_;
};

}  // namespace powergrain
