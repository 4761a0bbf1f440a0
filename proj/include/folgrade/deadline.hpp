#pragma once

#include <chrono>
#include <stop_token>

namespace folgrade {

/// Cooperative cancellation point shared by the search engines: a wall-clock
/// instant plus an optional stop token. Engines poll `expired()`.
class Deadline {
 public:
  using Clock = std::chrono::steady_clock;

  Deadline() : at_(Clock::time_point::max()) {}
  explicit Deadline(Clock::time_point at, std::stop_token stop = {}) : at_(at), stop_(std::move(stop)) {}

  static Deadline never() { return Deadline(); }
  static Deadline after(Clock::duration d) { return Deadline(Clock::now() + d); }

  bool expired() const { return stop_.stop_requested() || Clock::now() >= at_; }
  bool stopRequested() const { return stop_.stop_requested(); }
  Clock::time_point at() const { return at_; }

  Deadline withStop(std::stop_token stop) const { return Deadline(at_, std::move(stop)); }

 private:
  Clock::time_point at_;
  std::stop_token stop_;
};

}  // namespace folgrade
