#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace authsim {

// Simulation time in seconds.
using Seconds = double;

struct Event {
  Seconds fire_at = 0.0;
  std::uint64_t seq = 0;
  std::function<void()> action;
};

// Time-ordered event schedule with its own clock. Events with equal fire_at
// run in insertion order.
class EventSchedule {
 public:
  using Observer = std::function<void(Seconds fire_at, std::uint64_t seq)>;

  // Returns the sequence number assigned to the event.
  // Throws PastEventError if fire_at < now().
  std::uint64_t schedule(Seconds fire_at, std::function<void()> action);

  std::uint64_t schedule_after(Seconds delay, std::function<void()> action) {
    return schedule(now_ + delay, std::move(action));
  }

  // Executes every pending event with fire_at <= horizon, including events
  // scheduled by actions during the call. Afterwards now() == horizon.
  std::uint64_t run_until(Seconds horizon);

  // Removes and returns the minimum (fire_at, seq) event without running it
  // or moving the clock.
  Event pop();

  Seconds now() const noexcept { return now_; }
  std::size_t pending() const noexcept { return heap_.size(); }
  bool empty() const noexcept { return heap_.empty(); }
  Seconds next_fire_at() const;

  // Called with (fire_at, seq) before each executed action.
  void set_observer(Observer observer) { observer_ = std::move(observer); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  Event take_next();

  std::vector<Event> heap_;
  Seconds now_ = 0.0;
  std::uint64_t next_seq_ = 0;
  Observer observer_;
};

// Mixes (seed, index) into a well-spread 64-bit seed. Used to derive
// independent streams, replication seeds, and sweep point seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

// Seedable 64-bit Mersenne Twister stream. Samples are bit-exact for a given
// (seed, stream_id) on any conforming platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const noexcept { return seed_; }

  // Uniform on the 2^53-point grid (k + 0.5) / 2^53, strictly inside (0, 1).
  double uniform_open();

  // -mean * ln(u) with u from uniform_open(); always > 0.
  // Throws ParameterError if mean <= 0.
  double exponential(double mean);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

double sample_exponential(RngStream& rng, double mean);

}  // namespace authsim
