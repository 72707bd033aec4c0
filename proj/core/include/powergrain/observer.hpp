#pragma once

#include <functional>
#include <vector>

#include "powergrain/readings.hpp"

namespace powergrain {

struct ObserverScope {
  enum class Kind { System, Process };

  Kind kind = Kind::System;
  int pid = 0;

  static ObserverScope system() { return {Kind::System, 0}; }
  static ObserverScope process(int pid);  // throws DomainError unless pid > 0

  bool is_process() const { return kind == Kind::Process; }
};

/// Injectable time source so fixture-backed observers are deterministic.
using Clock = std::function<double()>;

Clock wall_clock();

/// Measurement adapter contract. trigger() refreshes all of the observer's
/// readings atomically with a fresh timestamp; get_readings() exposes them as
/// base-typed handles that callers narrow with dynamic_cast (a mismatched
/// narrow yields nullptr, never a crash). The handles point into the
/// observer and stay valid until the next trigger; copy the pointee to keep
/// a snapshot.
///
/// Instances are single-owner: do not call trigger/get_readings concurrently
/// on one instance. Distinct instances are independent.
class Observer {
 public:
  explicit Observer(ObserverScope scope, Clock clock = wall_clock());
  virtual ~Observer() = default;

  Observer(const Observer&) = delete;
  Observer& operator=(const Observer&) = delete;

  virtual void trigger() = 0;

  /// Layout (length and subtype order) is fixed per adapter and stable
  /// across triggers. Throws NotTriggered before the first trigger().
  std::vector<Readings*> get_readings();

  const ObserverScope& scope() const { return scope_; }
  bool triggered() const { return triggered_; }

 protected:
  virtual std::vector<Readings*> readings_views() = 0;

  /// Returns (now, delta since previous trigger); delta is 0 on the first
  /// trigger. Call once per trigger().
  std::pair<double, double> advance_clock();
  void mark_triggered() { triggered_ = true; }

 private:
  ObserverScope scope_;
  Clock clock_;
  bool triggered_ = false;
  bool has_last_ = false;
  double last_timestamp_ = 0.0;
};

}  // namespace powergrain
