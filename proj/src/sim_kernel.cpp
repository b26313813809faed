#include "authsim/sim_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "authsim/errors.hpp"

namespace authsim {

std::uint64_t EventSchedule::schedule(Seconds fire_at, std::function<void()> action) {
  if (!(fire_at >= now_)) {
    throw PastEventError(fmt::format("event at t={} is before clock t={}", fire_at, now_));
  }
  const std::uint64_t seq = next_seq_++;
  heap_.push_back(Event{fire_at, seq, std::move(action)});
  std::push_heap(heap_.begin(), heap_.end(), Later{});
  return seq;
}

std::uint64_t EventSchedule::run_until(Seconds horizon) {
  if (horizon < now_) {
    throw PastEventError(fmt::format("horizon t={} is before clock t={}", horizon, now_));
  }
  std::uint64_t executed = 0;
  while (!heap_.empty() && heap_.front().fire_at <= horizon) {
    Event event = take_next();
    now_ = event.fire_at;
    if (observer_) observer_(event.fire_at, event.seq);
    if (event.action) event.action();
    ++executed;
  }
  now_ = horizon;
  return executed;
}

Event EventSchedule::pop() {
  if (heap_.empty()) throw Error("pop from empty event schedule");
  return take_next();
}

Event EventSchedule::take_next() {
  std::pop_heap(heap_.begin(), heap_.end(), Later{});
  Event event = std::move(heap_.back());
  heap_.pop_back();
  return event;
}

Seconds EventSchedule::next_fire_at() const {
  return heap_.empty() ? std::numeric_limits<Seconds>::infinity() : heap_.front().fire_at;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  // splitmix64 finalizer applied twice over the combined input.
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ (index * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), engine_(derive_seed(seed, stream_id)) {}

double RngStream::uniform_open() {
  constexpr double kScale = 0x1.0p-53;
  return (static_cast<double>(engine_() >> 11) + 0.5) * kScale;
}

double RngStream::exponential(double mean) {
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw ParameterError(fmt::format("exponential mean must be positive, got {}", mean));
  }
  return -mean * std::log(uniform_open());
}

double sample_exponential(RngStream& rng, double mean) { return rng.exponential(mean); }

}  // namespace authsim
