#pragma once

#include <string>

namespace hwsim {

/// One scheduled vehicle creation at the roadway entrance, typically built
/// from entrance-detector records so a recorded arrival process can be fed
/// into another run unchanged.
struct ReplayEntry {
  double time = 0.0;       // s, when the vehicle appears with its front at x = 0
  std::string type;        // "sedan" or "truck"
  double velocity = 0.0;   // m/s at creation
  int lane = 0;
  int direction = 1;
};

} // namespace hwsim
