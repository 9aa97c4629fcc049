#pragma once

#include "hwsim/vehicle.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <vector>

namespace hwsim {

/// Road geometry, injection policy, and step timing.
struct HighwayConfig {
  double length = 1000.0;       // m, (0, 10000]
  int lanes_per_direction = 1;  // [1, 5]
  double lane_width = 5.0;      // m
  double median_gap = 5.0;      // m
  bool bidirectional = false;

  double delta_t = 0.1;              // s
  int lane_change_period_steps = 10; // lane changes every N steps

  bool auto_injection = true;
  double min_gap = 10.0;      // m, entrance spacing before the next injection
  double injection_mix = 0.8; // fraction of injected vehicles that are sedans

  std::uint64_t seed = 0;             // drives the sedan/truck mix
  bool lane_change_prefer_right = true; // side tried first when both pass

  /// Returns a message naming every violated bound, empty when valid.
  std::string validate() const;
};

class Highway;

/// User hooks fired by the highway. All run on the stepping thread.
struct HookSet {
  /// Fired once at construction with the id counter (initially 1). Return
  /// true if vehicles were added or settings changed, so lane lists get
  /// re-sorted; return false to leave lane order untouched.
  std::function<bool(Highway&, int&)> init_vehicle;

  /// Fired for every managed entity on every step. Return true if the hook
  /// changed the vehicle's position itself; the mobility model then skips
  /// that vehicle for this step. Return false to let the model drive it.
  std::function<bool(Highway&, Vehicle&, double)> control_vehicle;

  /// Fired when a vehicle successfully receives data from the network, with
  /// the receiver, the payload, and the sender's address.
  std::function<void(Vehicle&, std::span<const std::byte>, std::uint32_t)> receive_data;
};

/// Owns all vehicles and advances their mobility every delta_t: lane changes
/// on the configured cadence, then per-lane IDM updates in round-robin lane
/// order starting from the rightmost eastbound lane, then removal of exited
/// vehicles, then automatic injection. Single-threaded by design; hooks run
/// inline on the stepping thread.
class Highway {
public:
  explicit Highway(const HighwayConfig& config, HookSet hooks = {});

  Highway(const Highway&) = delete;
  Highway& operator=(const Highway&) = delete;

  /// Sorted insertion into the lane list keyed by lane, direction, and x.
  /// Off-road entities (lane < 0) are registered but not placed in a lane.
  /// Throws on duplicate ids and out-of-range lanes.
  Vehicle& add_vehicle(Vehicle vehicle);

  /// Advances the simulation by one delta_t. A handler error aborts the
  /// step with diagnostics and leaves the highway unusable; the aborted
  /// step is never presented as completed.
  void step();

  Vehicle* find_vehicle(int id);
  const Vehicle* find_vehicle(int id) const;

  /// Every managed entity (both directions, all lanes, on- and off-road,
  /// obstacles included) within a 3D Euclidean distance of `range` meters
  /// from the subject, boundary inclusive, excluding the subject itself.
  /// Ordered by ascending id.
  std::vector<const Vehicle*> find_vehicles_in_range(const Vehicle& subject, double range) const;

  /// Entities in one lane with rear position x in [x1, x2), ascending x.
  /// Throws when x1 > x2.
  std::vector<const Vehicle*> find_vehicles_in_segment(int lane, int direction, double x1,
                                                       double x2) const;

  /// On-road entities in deterministic order: eastbound lanes 0..n-1 by
  /// ascending x, then westbound.
  std::vector<const Vehicle*> on_road_vehicles() const;

  /// All managed entities including off-road ones, ascending id.
  std::vector<const Vehicle*> all_entities() const;

  std::vector<const Vehicle*> lane_vehicles(int lane, int direction) const;

  /// Travel-frame position converted to global coordinates: westbound x is
  /// mirrored about the highway length, y is signed by direction.
  Vec3 global_position(const Vehicle& vehicle) const;
  double lane_center_y(int lane, int direction) const;

  const HighwayConfig& config() const { return config_; }
  double clock() const { return clock_; }
  long step_count() const { return step_count_; }

  int vehicles_created() const { return vehicles_created_; }
  int vehicles_exited() const { return vehicles_exited_; }
  int on_road_count() const;

  struct ExitEvent {
    double time;
    int vehicle_id;
  };
  const std::vector<ExitEvent>& exit_events() const { return exit_events_; }

  struct LaneChangeEvent {
    double time;
    int vehicle_id;
    int from_lane;
    int to_lane;
    int direction;
  };
  const std::vector<LaneChangeEvent>& lane_change_events() const { return lane_change_events_; }

  /// Id counter shared with the init hook and automatic injection.
  int peek_next_vehicle_id() const { return next_vehicle_id_; }
  int allocate_vehicle_id() { return next_vehicle_id_++; }

  /// Fires the receive_data hook for a delivered payload. Called by the
  /// radio channel.
  void dispatch_receive(Vehicle& receiver, std::span<const std::byte> payload,
                        std::uint32_t sender_address);

private:
  using LaneList = std::vector<Vehicle*>;

  void apply_lane_changes();
  void update_lane_mobility(const LaneList& snapshot);
  void remove_exited();
  void try_inject();
  void inject_into_lane(int lane, int direction);

  LaneList& lane_list(int lane, int direction);
  const LaneList& lane_list(int lane, int direction) const;
  void insert_sorted(LaneList& lane, Vehicle* vehicle);
  const Vehicle* front_neighbor_in(const LaneList& lane, const Vehicle& vehicle) const;
  bool try_change_to(Vehicle& vehicle, int target_lane);
  void integrate(Vehicle& vehicle, double accel);

  HighwayConfig config_;
  HookSet hooks_;
  std::map<int, std::unique_ptr<Vehicle>> vehicles_; // ordered for deterministic id walks
  std::vector<LaneList> lanes_;                      // [direction_index * lanes + lane]
  std::vector<Vehicle*> off_road_;                   // ascending id
  std::mt19937_64 rng_;
  double clock_ = 0.0;
  long step_count_ = 0;
  bool failed_ = false;
  int next_vehicle_id_ = 1;
  int vehicles_created_ = 0;
  int vehicles_exited_ = 0;
  std::vector<ExitEvent> exit_events_;
  std::vector<LaneChangeEvent> lane_change_events_;
};

} // namespace hwsim
