#include "coat/bench/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace coat {

namespace {

struct CarState {
  double x = 0.0, y = 0.0;  // position, m
  double psi = 0.0;         // heading, rad
  double v = 0.0;           // speed, m/s
  double lam = 0.0;         // internal progress reference, m (unwrapped)
};

/// One integration step of the kinematic bicycle plus the progress reference.
/// The reference advances at v * cos(heading error) but never retreats, so a
/// car that points away from the track direction leaves its reference behind.
void step(const Track& track, const CarParams& p, double steer, double accel,
          double dt, CarState* s) {
  s->x += s->v * std::cos(s->psi) * dt;
  s->y += s->v * std::sin(s->psi) * dt;
  s->psi += s->v / p.wheelbase * std::tan(steer) * dt;
  s->v = std::clamp(s->v + accel * dt, p.v_min, p.v_max);
  const double align = std::cos(s->psi - track.heading(s->lam));
  s->lam += std::max(0.0, s->v * align) * dt;
}

/// Advances the real car by one tick of length dt using fixed-size micro
/// steps.  The micro step is dt / round(dt / 0.0025), which is bit-identical
/// across dt, dt/2, dt/4, ... (powers of two divide exactly), so halving dt
/// re-samples the same trajectory instead of integrating a different one and
/// lap times become insensitive to the tick length.
void advance_tick(const Track& track, const CarParams& p, double steer,
                  double accel, CarState* s) {
  const int n_micro =
      std::max(1, static_cast<int>(std::lround(p.dt / 0.0025)));
  const double micro = p.dt / n_micro;
  for (int i = 0; i < n_micro; ++i) step(track, p, steer, accel, micro, s);
}

}  // namespace

LapOutcome simulate_lap(const Track& track, const CarParams& p,
                        double q_contour, double q_lag) {
  const double lap_len = track.lap_length();
  const double half_width = 0.5 * track.width();
  const int n_look =
      std::max(1, static_cast<int>(std::lround(p.lookahead / p.predict_dt)));
  const int hold_ticks =
      std::max(1, static_cast<int>(std::lround(p.control_period / p.dt)));

  const double steer_levels[5] = {-p.steer_max, -0.5 * p.steer_max, 0.0,
                                  0.5 * p.steer_max, p.steer_max};
  const double accel_levels[3] = {-p.accel_max, 0.0, p.accel_max};

  // Per-substep projection windows.  The car advances at most v_max * step
  // per substep; cutting a corner can gain arc slightly faster than path
  // length, so leave generous slack.  The window must stay well under half a
  // lap so the projection cannot lock onto the far side of the course.
  const double win_fwd_pred = p.v_max * p.predict_dt + 0.35;
  const double win_fwd_real = p.v_max * p.dt + 0.35;
  const double win_back = 0.35;

  CarState car;
  track.position(0.0, &car.x, &car.y);
  car.psi = track.heading(0.0);
  car.v = p.v0;
  double s_car = 0.0;  // unwrapped projected progress of the real car
  double t = 0.0;
  const int max_ticks = static_cast<int>(p.time_budget / p.dt) + 1;

  double best_steer = 0.0, best_accel = 0.0;
  for (int tick = 0; tick < max_ticks; ++tick) {
    if (tick % hold_ticks == 0) {
      // Greedy action selection: roll each action out over the lookahead and
      // accumulate stage costs.  The progress reference starts from the car's
      // true projected progress, so the lag error within the horizon measures
      // how far the predicted motion outruns (or trails) honest
      // path-following.
      double best_cost = std::numeric_limits<double>::infinity();
      for (double steer : steer_levels) {
        for (double accel : accel_levels) {
          CarState pred = car;
          pred.lam = s_car;
          double ps = s_car;
          double acc_con = 0.0, acc_lag = 0.0;
          for (int k = 0; k < n_look; ++k) {
            step(track, p, steer, accel, p.predict_dt, &pred);
            const TrackProjection proj =
                track.project(pred.x, pred.y, ps, win_back, win_fwd_pred);
            ps = proj.arc;
            const double e_con = proj.lateral;
            const double e_lag = ps - pred.lam;
            acc_con += e_con * e_con;
            acc_lag += e_lag * e_lag;
          }
          const double sn = steer / p.steer_max;
          const double an = accel / p.accel_max;
          const double cost = (q_contour * acc_con + q_lag * acc_lag) / n_look -
                              p.q_progress * (ps - s_car) + p.r_steer * sn * sn +
                              p.r_accel * an * an;
          if (cost < best_cost) {
            best_cost = cost;
            best_steer = steer;
            best_accel = accel;
          }
        }
      }
      car.lam = s_car;
    }

    // Apply the held action for one tick.
    advance_tick(track, p, best_steer, best_accel, &car);
    t += p.dt;

    const TrackProjection proj =
        track.project(car.x, car.y, s_car, win_back, win_fwd_real);
    const double s_prev = s_car;
    s_car = proj.arc;
    if (std::abs(proj.lateral) > half_width) {
      return {std::numeric_limits<double>::infinity(), true};
    }
    if (s_car >= lap_len) {
      // Interpolate the crossing time within this tick.
      const double frac = (lap_len - s_prev) / (s_car - s_prev);
      return {t - p.dt + frac * p.dt, false};
    }
  }
  return {std::numeric_limits<double>::infinity(), true};
}

}  // namespace coat
