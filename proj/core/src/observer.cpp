#include "powergrain/observer.hpp"

#include <chrono>

#include "powergrain/error.hpp"

namespace powergrain {

ObserverScope ObserverScope::process(int pid) {
  if (pid <= 0) {
    throw DomainError("process scope requires pid > 0, got " + std::to_string(pid));
  }
  return {Kind::Process, pid};
}

Clock wall_clock() {
  return [] {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    return std::chrono::duration<double>(now).count();
  };
}

Observer::Observer(ObserverScope scope, Clock clock)
    : scope_(scope), clock_(std::move(clock)) {}

std::vector<Readings*> Observer::get_readings() {
  if (!triggered_) {
    throw NotTriggered("get_readings() before the first trigger()");
  }
  return readings_views();
}

std::pair<double, double> Observer::advance_clock() {
  const double now = clock_();
  double delta = 0.0;
  if (has_last_) {
    delta = now - last_timestamp_;
    if (delta < 0.0) delta = 0.0;  // non-monotone host clock
  }
  has_last_ = true;
  last_timestamp_ = now;
  return {now, delta};
}

}  // namespace powergrain
