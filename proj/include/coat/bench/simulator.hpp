#pragma once

// Toy lap-time simulator: a kinematic bicycle driven by a greedy one-step
// contouring controller.  The controller enumerates a small discrete action
// set (steering x acceleration), rolls each action out over a short fixed
// lookahead horizon, and scores the rollout with stage-accumulated errors:
//
//   cost = mean_k [ q_contour * e_c(k)^2 + q_lag * e_l(k)^2 ]
//          - q_progress * (projected advance over the horizon)
//          + r_steer * (steer/steer_max)^2 + r_accel * (accel/accel_max)^2
//
// Both errors come from the nearest-segment projection of the predicted
// position onto the centerline: e_c is the signed lateral offset at the
// projection, and e_l is the arc-length gap between the projection and an
// internal progress reference lambda that evolves by
// d(lambda)/dt = max(0, v * cos(heading_err)) and is re-synced to the car's
// true projected progress at every decision point.  Cutting a corner advances
// the projection (earning progress reward) while the reference stalls, which
// stretches e_l -- exactly what q_lag penalizes; drifting off-line grows e_c.
// Low tracking weights therefore cut corners until the car leaves the track;
// high weights brake into curves and lap slowly.
//
// The controller re-decides every control_period and holds the chosen action
// in between, while the bicycle integrates at dt.  Rollouts inside the
// controller integrate at the fixed predict_dt.  Decision times and the
// state-to-action map are thus independent of dt, so refining the integration
// step perturbs lap times only through integration error, not through a
// change in controller behavior.
//
// The two tuned parameters are (q_contour, q_lag); everything else is fixed.
// A lap is a flying start at arc 0.  The run ends when the car's projected
// progress passes the lap length (finish time interpolated within the final
// tick), when it strays beyond half the track width, or when the time budget
// expires (the latter two are reported as DNF).  The simulation is fully
// deterministic; measurement noise is added by callers.

#include "coat/bench/track.hpp"

namespace coat {

struct CarParams {
  double wheelbase = 0.09;   // m
  double dt = 0.02;          // integration step, s
  double control_period = 0.04;  // action hold time, s (>= dt)
  double predict_dt = 0.02;  // rollout integration step inside the controller
  double lookahead = 0.2;    // action-evaluation horizon, s
  double v_min = 0.3;        // m/s, floor after braking
  double v_max = 3.5;        // m/s
  double v0 = 1.2;           // flying-lap entry speed, m/s
  double accel_max = 2.8;    // m/s^2, magnitude of the accelerate/brake action
  double steer_max = 0.38;   // rad
  double q_progress = 3.3;   // reward weight on projected advance
  double r_steer = 0.3;      // cost on (steer/steer_max)^2
  double r_accel = 0.1;      // cost on (accel/accel_max)^2
  double time_budget = 30.0; // s, DNF beyond this
};

struct LapOutcome {
  double seconds = 0.0;  // +inf when dnf
  bool dnf = false;
};

/// Simulates one flying lap with the given contouring/lag weights.
/// Deterministic: identical inputs give bit-identical outcomes.
LapOutcome simulate_lap(const Track& track, const CarParams& params,
                        double q_contour, double q_lag);

}  // namespace coat
