#include "qrocket/lander.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "qrocket/errors.hpp"

namespace qrocket::env {

namespace {
constexpr double kPi = 3.141592653589793;
constexpr double kContactTol = 1e-9;
// Landing gear tolerance: a leg counts as grounded within this height, so a
// near-upright rocket rests on both legs instead of rocking forever on the
// exact pivot. Ground reaction and friction still need true contact.
constexpr double kContactSlop = 0.02;
}  // namespace

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::flying: return "flying";
    case Outcome::landed: return "landed";
    case Outcome::crashed: return "crashed";
    case Outcome::out_of_bounds: return "out_of_bounds";
    case Outcome::timeout: return "timeout";
  }
  return "unknown";
}

std::pair<double, double> sample_disturbance(Rng& rng, const EnvConfig& cfg) {
  const double wind = cfg.wind_max > 0.0 ? rng.uniform(-cfg.wind_max, cfg.wind_max) : 0.0;
  const double turb =
      cfg.turbulence_max > 0.0 ? rng.uniform(-cfg.turbulence_max, cfg.turbulence_max) : 0.0;
  return {wind, turb};
}

LanderEnv::LanderEnv(EnvConfig cfg, RewardConfig reward)
    : cfg_(cfg), reward_(reward), rng_(0) {
  if (cfg_.dt <= 0.0 || cfg_.mass <= 0.0 || cfg_.inertia <= 0.0 || cfg_.max_steps < 1) {
    throw ConfigError("invalid environment configuration");
  }
  if (reward_.xi < 0.0 || reward_.mu < 0.0 || reward_.chi < 0.0) {
    throw ConfigError("reward correction constants must be non-negative");
  }
}

LanderState LanderEnv::reset(std::uint64_t seed) {
  rng_ = Rng(seed);
  state_ = LanderState{};
  state_.x = rng_.uniform(-cfg_.init_x_range, cfg_.init_x_range);
  state_.y = cfg_.init_y;
  state_.vx = rng_.uniform(-cfg_.init_vx_range, cfg_.init_vx_range);
  state_.vy = rng_.uniform(cfg_.init_vy_low, 0.0);
  state_.theta = rng_.uniform(-cfg_.init_angle_range, cfg_.init_angle_range);
  state_.omega = rng_.uniform(-cfg_.init_omega_range, cfg_.init_omega_range);
  state_.leg_left = state_.leg_right = false;

  prev_d_ = std::hypot(state_.x, state_.y);
  prev_v_ = std::hypot(state_.vx, state_.vy);
  prev_absw_ = std::fabs(state_.omega);
  step_count_ = 0;
  done_ = false;
  return state_;
}

StepResult LanderEnv::step(Action action) {
  if (done_) throw std::logic_error("step() called on a finished episode");

  const auto [wind, turb] = sample_disturbance(rng_, cfg_);

  const double c = std::cos(state_.theta);
  const double s = std::sin(state_.theta);
  // Body axes in world coordinates: up = (-s, c), right = (c, s).
  double fx = wind, fy = 0.0, torque = turb;
  switch (action) {
    case Action::DoNothing:
      break;
    case Action::MainEngine:
      fx += cfg_.main_thrust * -s;
      fy += cfg_.main_thrust * c;
      break;
    case Action::LeftEngine:
      // Left engine pushes the body to the right and twists it clockwise.
      fx += cfg_.side_thrust * c;
      fy += cfg_.side_thrust * s;
      torque -= cfg_.side_thrust * cfg_.side_engine_arm;
      break;
    case Action::RightEngine:
      fx -= cfg_.side_thrust * c;
      fy -= cfg_.side_thrust * s;
      torque += cfg_.side_thrust * cfg_.side_engine_arm;
      break;
  }

  // Leg world positions before integration drive the tipping torque below.
  auto leg_y = [&](double ox) {
    return state_.y + ox * std::sin(state_.theta) - cfg_.leg_drop * std::cos(state_.theta);
  };
  auto leg_x = [&](double ox) {
    return state_.x + ox * std::cos(state_.theta) + cfg_.leg_drop * std::sin(state_.theta);
  };
  const double half = 0.5 * cfg_.leg_span;
  const bool left_down = leg_y(-half) <= kContactSlop;
  const bool right_down = leg_y(half) <= kContactSlop;
  if (left_down != right_down) {
    // Single-leg contact: gravity about the grounded leg rights the body.
    const double pivot_x = left_down ? leg_x(-half) : leg_x(half);
    torque += (state_.x - pivot_x) * (-cfg_.mass * cfg_.gravity);
  }

  // Semi-implicit Euler.
  state_.vx += (fx / cfg_.mass) * cfg_.dt;
  state_.vy += (fy / cfg_.mass - cfg_.gravity) * cfg_.dt;
  state_.omega += (torque / cfg_.inertia) * cfg_.dt;
  state_.x += state_.vx * cfg_.dt;
  state_.y += state_.vy * cfg_.dt;
  state_.theta += state_.omega * cfg_.dt;

  // Contact resolution: project the deepest leg back to the ground and zero
  // the downward velocity; friction damps the remaining motion.
  const double yl = leg_y(-half);
  const double yr = leg_y(half);
  const double min_leg = std::min(yl, yr);
  if (min_leg <= kContactTol) {
    if (min_leg < 0.0) state_.y -= min_leg;
    if (state_.vy < 0.0) state_.vy = 0.0;
    state_.vx *= 1.0 - cfg_.ground_friction;
    state_.omega *= 1.0 - cfg_.ground_friction;
  }
  state_.leg_left = leg_y(-half) <= kContactSlop;
  state_.leg_right = leg_y(half) <= kContactSlop;

  // Terminal classification.
  const double hull_bottom = state_.y - cfg_.body_radius * std::cos(state_.theta);
  const bool any_contact = state_.leg_left || state_.leg_right;
  const double speed = std::hypot(state_.vx, state_.vy);
  Outcome outcome = Outcome::flying;
  ++step_count_;
  if (hull_bottom <= 0.0 || (any_contact && std::fabs(state_.theta) > 0.5 * kPi)) {
    outcome = Outcome::crashed;
  } else if (std::fabs(state_.x) > cfg_.x_limit) {
    outcome = Outcome::out_of_bounds;
  } else if (state_.leg_left && state_.leg_right && speed < cfg_.rest_speed &&
             std::fabs(state_.omega) < cfg_.rest_omega) {
    outcome = Outcome::landed;
  } else if (step_count_ >= cfg_.max_steps) {
    outcome = Outcome::timeout;
  }

  const double d = std::hypot(state_.x, state_.y);
  const double v = speed;
  const double aw = std::fabs(state_.omega);
  double reward = -reward_.xi * (d - prev_d_) - reward_.mu * (v - prev_v_) -
                  reward_.chi * (aw - prev_absw_);
  if (outcome == Outcome::landed) reward += reward_.kappa_land;
  if (outcome == Outcome::crashed || outcome == Outcome::out_of_bounds) {
    reward += reward_.kappa_crash;
  }
  prev_d_ = d;
  prev_v_ = v;
  prev_absw_ = aw;

  done_ = outcome != Outcome::flying;
  return {state_, reward, done_, outcome};
}

void write_trajectory_header(std::ostream& os) {
  os << "t,x,y,vx,vy,theta,omega,dl,dr,action,reward,done,outcome\n";
}

void write_trajectory_row(std::ostream& os, int t, const LanderState& s, Action a,
                          double reward, bool done, Outcome outcome) {
  os << t << ',' << s.x << ',' << s.y << ',' << s.vx << ',' << s.vy << ',' << s.theta
     << ',' << s.omega << ',' << (s.leg_left ? 1 : 0) << ',' << (s.leg_right ? 1 : 0)
     << ',' << static_cast<int>(a) << ',' << reward << ',' << (done ? 1 : 0) << ','
     << outcome_name(outcome) << '\n';
}

}  // namespace qrocket::env
