#pragma once

#include "hwsim/highway.hpp"

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace hwsim {

/// Unit-disk channel settings. Losses are Bernoulli per receiver, drawn from
/// the channel's own seeded stream so runs stay reproducible.
struct ChannelConfig {
  int latency_steps = 0;         // whole highway steps between send and delivery
  double loss_probability = 0.0; // per-receiver drop probability in [0, 1]
  std::uint64_t seed = 0;
};

struct ChannelEvent {
  enum class Kind { send, deliver, drop };
  double time = 0.0;
  Kind kind = Kind::send;
  std::uint32_t sender = 0;
  std::optional<std::uint32_t> receiver; // absent on SEND and unreachable broadcasts
  std::size_t bytes = 0;
};

/// Range-gated broadcast/unicast channel standing in for a full wireless
/// stack. Reachability is evaluated with 3D positions at send time; delivery
/// happens latency_steps highway steps later in a deterministic order (send
/// time, then sender address, then receiver address) and dispatches the
/// receive_data hook. Every send, delivery, and drop lands in the event log.
class Channel {
public:
  explicit Channel(ChannelConfig config = {});

  /// Queues a broadcast to every entity within the sender's transmit range.
  /// Throws when the sender's radio is disabled.
  void broadcast(const Highway& highway, const Vehicle& sender, std::vector<std::byte> payload);

  /// Queues a unicast. Unknown, out-of-range, or departed destinations end
  /// as logged drops. Throws on a disabled radio or a self-destination.
  void unicast(const Highway& highway, const Vehicle& sender, std::uint32_t dest_address,
               std::vector<std::byte> payload);

  /// Dispatches every message whose delivery step has arrived. Call once per
  /// highway step, after the mobility update.
  void deliver_pending(Highway& highway);

  const std::vector<ChannelEvent>& event_log() const { return log_; }
  void write_log(std::ostream& out) const;

  long messages_sent() const { return messages_sent_; }
  long messages_resolved() const { return messages_resolved_; }
  long delivery_attempts() const { return attempts_; }
  long deliveries() const { return deliveries_; }
  long drops() const { return drops_; }

private:
  struct PendingMessage {
    double send_time;
    long send_step;
    long sequence;
    std::uint32_t sender;
    double sender_range;
    Vec3 sender_position; // global, captured at send time
    bool is_broadcast;
    std::vector<std::uint32_t> candidates; // in-range receivers at send time, ascending
    std::optional<std::uint32_t> dest;     // unicast destination
    bool dest_reachable = false;
    std::vector<std::byte> payload;
  };

  void enqueue(PendingMessage message);
  bool loss_draw();

  ChannelConfig config_;
  std::mt19937_64 rng_;
  std::deque<PendingMessage> pending_;
  std::vector<ChannelEvent> log_;
  long sequence_ = 0;
  long messages_sent_ = 0;
  long messages_resolved_ = 0;
  long attempts_ = 0;
  long deliveries_ = 0;
  long drops_ = 0;
};

std::vector<std::byte> to_payload(std::string_view text);
std::string payload_text(std::span<const std::byte> payload);

} // namespace hwsim
