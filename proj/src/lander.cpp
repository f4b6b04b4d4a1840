#include "ract/lander.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ract/io_util.hpp"

namespace ract::env {

namespace {

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

double main_power(double main) { return main > 0.0 ? 0.5 + 0.5 * main : 0.0; }

// dir: +1 right engine, -1 left engine, 0 off. power in [0.5, 1] when firing.
void side_engine(double lateral, double& dir, double& power) {
  if (lateral >= 0.5) {
    dir = 1.0;
    power = lateral;
  } else if (lateral <= -0.5) {
    dir = -1.0;
    power = -lateral;
  } else {
    dir = 0.0;
    power = 0.0;
  }
}

}  // namespace

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::none: return "none";
    case Termination::landed_rest: return "landed_rest";
    case Termination::crashed: return "crashed";
    case Termination::out_of_bounds: return "out_of_bounds";
    case Termination::step_limit: return "step_limit";
  }
  return "unknown";
}

LanderState LanderEnv::reset(RngStream& rng) {
  state_ = LanderState{};
  state_.y = cfg_.start_y;
  state_.vx = rng.uniform(-cfg_.start_vx_max, cfg_.start_vx_max);
  step_index_ = 0;
  rest_count_ = 0;
  done_ = false;
  started_ = true;
  return state_;
}

void LanderEnv::restore(const LanderState& s, int step_index, int rest_count) {
  state_ = s;
  step_index_ = step_index;
  rest_count_ = rest_count;
  done_ = false;
  started_ = true;
}

double LanderEnv::potential(const LanderState& s) const {
  const double dist = std::hypot(s.x, s.y);
  const double speed = std::hypot(s.vx, s.vy);
  return -cfg_.w_dist * dist - cfg_.w_speed * speed - cfg_.w_tilt * std::abs(s.angle);
}

double LanderEnv::reward_of(const LanderState& prev, const LanderAction& action,
                            const LanderState& next, Termination termination) const {
  const double shaping = potential(next) - potential(prev);

  double contact_gain = 0.0;
  if (next.left_contact > 0.5 && prev.left_contact < 0.5) contact_gain += cfg_.contact_bonus;
  if (next.right_contact > 0.5 && prev.right_contact < 0.5) contact_gain += cfg_.contact_bonus;

  const double engine_cost = clamp_unit(action.main) > 0.0 ? -cfg_.main_engine_cost : 0.0;

  double terminal = 0.0;
  if (termination == Termination::landed_rest) terminal = cfg_.terminal_rest_bonus;
  if (termination == Termination::crashed || termination == Termination::out_of_bounds)
    terminal = -cfg_.terminal_crash_penalty;

  return shaping + contact_gain + engine_cost + terminal;
}

StepResult LanderEnv::step(const LanderAction& action) {
  if (!started_) throw std::logic_error("lander: step() before reset()");
  if (done_) throw std::logic_error("lander: step() on a terminal state");

  const LanderAction a{clamp_unit(action.main), clamp_unit(action.lateral)};
  const LanderState prev = state_;
  LanderState s = state_;

  const double mp = main_power(a.main);
  double side_dir = 0.0, side_pw = 0.0;
  side_engine(a.lateral, side_dir, side_pw);

  const double sin_t = std::sin(s.angle);
  const double cos_t = std::cos(s.angle);
  // Body axes: up = (-sin, cos), right = (cos, sin). The right engine
  // (dir=+1) thrusts the hull leftward and torques it counter-clockwise.
  const double ax = mp * cfg_.main_thrust * (-sin_t) - side_dir * side_pw * cfg_.side_thrust * cos_t;
  double ay = mp * cfg_.main_thrust * cos_t - side_dir * side_pw * cfg_.side_thrust * sin_t -
              cfg_.gravity;
  const double ang_acc = side_dir * side_pw * cfg_.torque_gain;

  // Grounded legs absorb main-engine thrust below the liftoff margin;
  // weight keeps pressing the feet onto the pad.
  const bool grounded = prev.left_contact > 0.5 || prev.right_contact > 0.5;
  if (grounded && mp * cfg_.main_thrust * cos_t <= cfg_.gravity + cfg_.leg_grip)
    ay = -cfg_.gravity;

  // Semi-implicit Euler.
  s.vx += ax * cfg_.dt;
  s.vy += ay * cfg_.dt;
  s.angular_velocity += ang_acc * cfg_.dt;
  s.x += s.vx * cfg_.dt;
  s.y += s.vy * cfg_.dt;
  s.angle += s.angular_velocity * cfg_.dt;

  Termination kind = Termination::none;

  // Leg feet heights (body offsets (+-leg_dx, -leg_dy) rotated into world).
  auto leg_height = [&](double dx) {
    return s.y + dx * std::sin(s.angle) - cfg_.leg_dy * std::cos(s.angle);
  };
  double left_y = leg_height(-cfg_.leg_dx);
  double right_y = leg_height(cfg_.leg_dx);

  s.left_contact = 0.0;
  s.right_contact = 0.0;
  const double lowest = std::min(left_y, right_y);
  if (lowest <= 0.0) {
    const double impact_speed = std::hypot(s.vx, s.vy);
    if (impact_speed > cfg_.safe_speed || std::abs(s.angle) > cfg_.safe_angle ||
        std::abs(s.x) > cfg_.pad_half_width) {
      kind = Termination::crashed;
      s.y -= lowest;
      s.left_contact = left_y <= right_y ? 1.0 : 0.0;
      s.right_contact = right_y <= left_y ? 1.0 : 0.0;
    } else {
      // Grounded: snap the deepest foot onto the ground and settle.
      s.y -= lowest;
      if (s.vy < 0.0) s.vy = 0.0;
      s.vx *= cfg_.ground_friction;
      s.angular_velocity = 0.0;
      s.angle *= cfg_.settle_rate;
      left_y = leg_height(-cfg_.leg_dx);
      right_y = leg_height(cfg_.leg_dx);
      constexpr double kContactTol = 1e-3;  // a foot within a millimeter is down
      s.left_contact = left_y <= kContactTol ? 1.0 : 0.0;
      s.right_contact = right_y <= kContactTol ? 1.0 : 0.0;
    }
  }

  if (kind == Termination::none) {
    const bool both = s.left_contact > 0.5 && s.right_contact > 0.5;
    if (both && std::hypot(s.vx, s.vy) < cfg_.rest_speed)
      ++rest_count_;
    else
      rest_count_ = 0;
    if (rest_count_ >= cfg_.rest_steps) kind = Termination::landed_rest;
  }

  if (kind == Termination::none &&
      (std::abs(s.x) > cfg_.bounds_x || s.y > cfg_.bounds_y))
    kind = Termination::out_of_bounds;

  ++step_index_;
  if (kind == Termination::none && step_index_ >= cfg_.step_limit)
    kind = Termination::step_limit;

  const double reward = reward_of(prev, a, s, kind);

  state_ = s;
  done_ = kind != Termination::none;

  return {s, reward, done_, kind};
}

std::string trajectory_csv_header() {
  return "t,x,y,vx,vy,angle,angvel,lc,rc,a_main,a_lat,reward,done";
}

std::string trajectory_csv_row(int t, const LanderState& s, const LanderAction& a, double reward,
                               bool done) {
  std::string row = std::to_string(t);
  for (double v : {s.x, s.y, s.vx, s.vy, s.angle, s.angular_velocity, s.left_contact,
                   s.right_contact, a.main, a.lateral, reward}) {
    row += ',';
    row += format_double(v);
  }
  row += done ? ",1" : ",0";
  return row;
}

}  // namespace ract::env
