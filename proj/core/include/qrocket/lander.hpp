#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>

#include "qrocket/rng.hpp"

namespace qrocket::env {

// Observation: position, linear velocity, attitude, angular velocity and
// the two leg-contact flags. The pad is at the origin; theta is the angle
// between the body axis and the ground normal (counterclockwise positive).
struct LanderState {
  double x = 0.0, y = 0.0;
  double vx = 0.0, vy = 0.0;
  double theta = 0.0, omega = 0.0;
  bool leg_left = false, leg_right = false;

  std::array<double, 8> as_obs() const {
    return {x, y, vx, vy, theta, omega, leg_left ? 1.0 : 0.0, leg_right ? 1.0 : 0.0};
  }
};

struct EnvConfig {
  double gravity = 10.0;       // units/s^2, downward
  double dt = 0.02;            // s
  double wind_max = 15.0;      // max horizontal wind force
  double turbulence_max = 1.5; // max disturbance torque
  double main_thrust = 65.0;   // force along the body axis
  double side_thrust = 3.0;    // lateral force of one side engine
  double mass = 5.0;
  double inertia = 5.0;
  double side_engine_arm = 2.0;  // lever arm of the side engines above the COM
  double leg_span = 1.0;         // horizontal distance between the legs
  double leg_drop = 0.9;         // legs sit this far below the COM
  double body_radius = 0.6;      // hull bottom below the COM
  double ground_friction = 0.3;  // per-step velocity damping while in contact
  double rest_speed = 0.05;      // |v| below this with both legs down = landed
  double rest_omega = 0.1;
  int max_steps = 1000;
  double x_limit = 10.0;
  // Initial-condition ranges (uniform draws at reset).
  double init_x_range = 0.5;
  double init_y = 6.0;
  double init_vx_range = 0.5;
  double init_vy_low = -1.0;
  double init_angle_range = 0.1;
  double init_omega_range = 0.1;
};

// Shaped reward: -xi*(d_t - d_{t-1}) - mu*(v_t - v_{t-1}) - chi*(|w_t| - |w_{t-1}|)
// plus a terminal bonus/penalty kappa.
struct RewardConfig {
  double xi = 100.0;
  double mu = 100.0;
  double chi = 100.0;
  double kappa_land = 100.0;
  double kappa_crash = -100.0;
};

enum class Action { DoNothing = 0, LeftEngine = 1, RightEngine = 2, MainEngine = 3 };

enum class Outcome { flying, landed, crashed, out_of_bounds, timeout };

const char* outcome_name(Outcome o);

struct StepResult {
  LanderState next_state;
  double reward = 0.0;
  bool done = false;
  Outcome outcome = Outcome::flying;
};

// Per-step disturbance, both drawn uniform within the configured bounds.
std::pair<double, double> sample_disturbance(Rng& rng, const EnvConfig& cfg);

// Deterministic-under-seed rigid-body environment integrated with
// semi-implicit Euler at fixed dt.
class LanderEnv {
 public:
  explicit LanderEnv(EnvConfig cfg = {}, RewardConfig reward = {});

  LanderState reset(std::uint64_t seed);
  // Throws std::logic_error if called after the episode ended.
  StepResult step(Action action);

  const LanderState& state() const { return state_; }
  const EnvConfig& config() const { return cfg_; }
  const RewardConfig& reward_config() const { return reward_; }
  bool done() const { return done_; }
  int step_count() const { return step_count_; }

 private:
  EnvConfig cfg_;
  RewardConfig reward_;
  LanderState state_;
  Rng rng_;
  double prev_d_ = 0.0, prev_v_ = 0.0, prev_absw_ = 0.0;
  int step_count_ = 0;
  bool done_ = true;
};

// Trajectory CSV: header + one row per step.
// Columns: t,x,y,vx,vy,theta,omega,dl,dr,action,reward,done,outcome
void write_trajectory_header(std::ostream& os);
void write_trajectory_row(std::ostream& os, int t, const LanderState& s, Action a,
                          double reward, bool done, Outcome outcome);

}  // namespace qrocket::env
