#include "hwsim/radio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace hwsim {

namespace {

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

} // namespace

Channel::Channel(ChannelConfig config) : config_(config), rng_(config.seed) {
  if (config_.latency_steps < 0) {
    throw std::invalid_argument("channel latency_steps must be non-negative");
  }
  if (config_.loss_probability < 0.0 || config_.loss_probability > 1.0) {
    throw std::invalid_argument("channel loss_probability must be in [0, 1]");
  }
}

void Channel::enqueue(PendingMessage message) {
  log_.push_back({message.send_time, ChannelEvent::Kind::send, message.sender, std::nullopt,
                  message.payload.size()});
  ++messages_sent_;
  pending_.push_back(std::move(message));
}

void Channel::broadcast(const Highway& highway, const Vehicle& sender,
                        std::vector<std::byte> payload) {
  if (!sender.radio().enabled) {
    throw std::invalid_argument("broadcast from a disabled radio");
  }
  PendingMessage msg;
  msg.send_time = highway.clock();
  msg.send_step = highway.step_count();
  msg.sequence = sequence_++;
  msg.sender = sender.radio().address;
  msg.sender_range = sender.radio().transmit_range;
  msg.sender_position = highway.global_position(sender);
  msg.is_broadcast = true;
  msg.payload = std::move(payload);
  for (const Vehicle* entity : highway.all_entities()) {
    if (entity->id() == sender.id() || !entity->radio().enabled) {
      continue;
    }
    if (distance(highway.global_position(*entity), msg.sender_position) <= msg.sender_range) {
      msg.candidates.push_back(entity->radio().address);
    }
  }
  enqueue(std::move(msg));
}

void Channel::unicast(const Highway& highway, const Vehicle& sender, std::uint32_t dest_address,
                      std::vector<std::byte> payload) {
  if (!sender.radio().enabled) {
    throw std::invalid_argument("unicast from a disabled radio");
  }
  if (dest_address == sender.radio().address) {
    throw std::invalid_argument("unicast to self");
  }
  PendingMessage msg;
  msg.send_time = highway.clock();
  msg.send_step = highway.step_count();
  msg.sequence = sequence_++;
  msg.sender = sender.radio().address;
  msg.sender_range = sender.radio().transmit_range;
  msg.sender_position = highway.global_position(sender);
  msg.is_broadcast = false;
  msg.dest = dest_address;
  msg.payload = std::move(payload);
  const Vehicle* dest = highway.find_vehicle(static_cast<int>(dest_address));
  msg.dest_reachable =
      dest != nullptr && dest->radio().enabled &&
      distance(highway.global_position(*dest), msg.sender_position) <= msg.sender_range;
  enqueue(std::move(msg));
}

bool Channel::loss_draw() {
  if (config_.loss_probability == 0.0) {
    return false; // no draw: keeps the stream untouched for lossless runs
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  return uniform(rng_) < config_.loss_probability;
}

void Channel::deliver_pending(Highway& highway) {
  // A message sent while step N runs carries send_step N-1 and becomes due
  // once the highway has completed latency_steps further steps.
  std::vector<PendingMessage> due;
  while (!pending_.empty() &&
         pending_.front().send_step + config_.latency_steps < highway.step_count()) {
    due.push_back(std::move(pending_.front()));
    pending_.pop_front();
  }
  std::sort(due.begin(), due.end(), [](const PendingMessage& a, const PendingMessage& b) {
    if (a.send_time != b.send_time) {
      return a.send_time < b.send_time;
    }
    if (a.sender != b.sender) {
      return a.sender < b.sender;
    }
    return a.sequence < b.sequence;
  });

  const double now = highway.clock();
  for (PendingMessage& msg : due) {
    ++messages_resolved_;
    std::vector<std::uint32_t> receivers;
    if (msg.is_broadcast) {
      receivers = msg.candidates;
    } else if (msg.dest_reachable) {
      receivers.push_back(*msg.dest);
    }
    if (receivers.empty()) {
      ++attempts_;
      ++drops_;
      log_.push_back({now, ChannelEvent::Kind::drop, msg.sender, msg.dest, msg.payload.size()});
      continue;
    }
    for (std::uint32_t address : receivers) {
      ++attempts_;
      Vehicle* receiver = highway.find_vehicle(static_cast<int>(address));
      if (receiver == nullptr || loss_draw()) {
        ++drops_;
        log_.push_back({now, ChannelEvent::Kind::drop, msg.sender, address, msg.payload.size()});
        continue;
      }
      ++deliveries_;
      log_.push_back({now, ChannelEvent::Kind::deliver, msg.sender, address, msg.payload.size()});
      highway.dispatch_receive(*receiver, msg.payload, msg.sender);
    }
  }
}

void Channel::write_log(std::ostream& out) const {
  char line[128];
  for (const ChannelEvent& e : log_) {
    const char* kind = e.kind == ChannelEvent::Kind::send      ? "SEND"
                       : e.kind == ChannelEvent::Kind::deliver ? "DELIVER"
                                                               : "DROP";
    const std::string receiver = e.receiver ? std::to_string(*e.receiver) : "-";
    std::snprintf(line, sizeof line, "%.3f %s %u %s %zu\n", e.time, kind, e.sender,
                  receiver.c_str(), e.bytes);
    out << line;
  }
}

std::vector<std::byte> to_payload(std::string_view text) {
  std::vector<std::byte> bytes(text.size());
  std::transform(text.begin(), text.end(), bytes.begin(),
                 [](char c) { return static_cast<std::byte>(c); });
  return bytes;
}

std::string payload_text(std::span<const std::byte> payload) {
  std::string text(payload.size(), '\0');
  std::transform(payload.begin(), payload.end(), text.begin(),
                 [](std::byte b) { return static_cast<char>(b); });
  return text;
}

} // namespace hwsim
