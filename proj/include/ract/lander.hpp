#pragma once

#include <array>
#include <string>

#include <json.hpp>

#include "ract/rng.hpp"

namespace ract::env {

struct LanderConfig {
  double gravity = 1.6;       // units/s^2
  double dt = 0.02;           // s/step
  int step_limit = 1000;

  double main_thrust = 2.35;   // acceleration along body-up at 100% throttle
  double side_thrust = 0.6;   // lateral acceleration at 100% throttle
  double torque_gain = 3.0;   // angular acceleration at 100% lateral throttle

  double start_y = 1.3;
  double start_vx_max = 0.4;  // initial horizontal impulse ~ U(-max, max)
  double bounds_x = 1.5;
  double bounds_y = 2.0;

  double leg_dx = 0.12;       // leg feet offsets from the hull center
  double leg_dy = 0.10;
  double safe_speed = 0.5;    // touching ground faster than this is a crash
  double safe_angle = 0.4;    // touching ground more tilted than this is a crash
  double pad_half_width = 0.5;  // touching ground beyond the pad is a crash
  double ground_friction = 0.3;
  double settle_rate = 0.7;   // per-step tilt decay while grounded
  double leg_grip = 0.9;      // extra accel the main engine must beat to lift off

  double rest_speed = 0.01;
  int rest_steps = 10;

  // Reward structure.
  double w_dist = 100.0;
  double w_speed = 80.0;
  double w_tilt = 150.0;
  double contact_bonus = 10.0;
  double main_engine_cost = 0.3;
  double terminal_rest_bonus = 100.0;
  double terminal_crash_penalty = 100.0;
  double reward_normalization = 100.0;  // raw episode return / this = reported reward
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(LanderConfig, gravity, dt, step_limit, main_thrust,
                                   side_thrust, torque_gain, start_y, start_vx_max, bounds_x,
                                   bounds_y, leg_dx, leg_dy, safe_speed, safe_angle,
                                   pad_half_width, ground_friction, settle_rate, leg_grip,
                                   rest_speed, rest_steps,
                                   w_dist, w_speed, w_tilt, contact_bonus, main_engine_cost,
                                   terminal_rest_bonus, terminal_crash_penalty,
                                   reward_normalization)

/// Emitted to policies as an 8-vector in exactly this field order.
struct LanderState {
  double x = 0.0, y = 0.0;
  double vx = 0.0, vy = 0.0;
  double angle = 0.0;
  double angular_velocity = 0.0;
  double left_contact = 0.0, right_contact = 0.0;

  std::array<double, 8> as_array() const {
    return {x, y, vx, vy, angle, angular_velocity, left_contact, right_contact};
  }
};

struct LanderAction {
  double main = 0.0;     // [-1,0] off; (0,1] maps to 50%-100% thrust
  double lateral = 0.0;  // [-1,-0.5] left engine, [0.5,1] right engine, else off
};

enum class Termination { none, landed_rest, crashed, out_of_bounds, step_limit };

const char* termination_name(Termination t);

struct StepResult {
  LanderState next_state;
  double reward = 0.0;
  bool done = false;
  Termination kind = Termination::none;
};

/// Deterministic point-mass-with-orientation lander. Same observation,
/// action, and reward interface as the usual 2-D lander task, with
/// hand-written dynamics (gravity, body-frame thrust, lateral-engine
/// torque, simple ground contact) instead of a physics engine.
class LanderEnv {
 public:
  explicit LanderEnv(LanderConfig cfg = {}) : cfg_(cfg) {}

  /// Places the lander near the top with a randomized horizontal impulse
  /// (one uniform draw from the stream).
  LanderState reset(RngStream& rng);

  /// Advances one step. Incoming action components are clamped to [-1,1]
  /// before dynamics. Throws std::logic_error on a terminal state.
  StepResult step(const LanderAction& action);

  /// Shaped per-step reward, decomposed exactly as:
  /// potential difference + new-contact bonuses + engine cost + terminal.
  double reward_of(const LanderState& prev, const LanderAction& action,
                   const LanderState& next, Termination termination) const;

  /// Potential used by the shaping term.
  double potential(const LanderState& s) const;

  const LanderState& state() const { return state_; }
  bool done() const { return done_; }
  int steps_taken() const { return step_index_; }
  const LanderConfig& config() const { return cfg_; }

  /// Restores an arbitrary pose (testing/replay).
  void restore(const LanderState& s, int step_index = 0, int rest_count = 0);

 private:
  LanderConfig cfg_;
  LanderState state_;
  int step_index_ = 0;
  int rest_count_ = 0;
  bool done_ = false;
  bool started_ = false;
};

std::string trajectory_csv_header();
std::string trajectory_csv_row(int t, const LanderState& s, const LanderAction& a, double reward,
                               bool done);

}  // namespace ract::env
