#include "graze/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace graze {

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::SigmaCrossing: return "sigma-crossing";
    case EventKind::SlidingEntry: return "sliding-entry";
    case EventKind::SlidingExit: return "sliding-exit";
    case EventKind::TangencyGraze: return "tangency-graze";
    case EventKind::SectionHit: return "section-hit";
    case EventKind::DomainExit: return "domain-exit";
    case EventKind::TimeLimit: return "time-limit";
    case EventKind::StepUnderflow: return "step-underflow";
  }
  return "?";
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Upper: return "upper";
    case Mode::Lower: return "lower";
    case Mode::Sliding: return "sliding";
  }
  return "?";
}

Vec2 OrbitSegment::at(double t) const {
  if (!dense.empty()) {
    auto it = std::upper_bound(dense.begin(), dense.end(), t,
                               [](double v, const DenseStep& d) { return v < d.t0; });
    if (it != dense.begin()) --it;
    return {it->eval(0, t), it->eval(1, t)};
  }
  if (!samples.empty()) {
    const auto& s = samples.back();
    return {s[1], s[2]};
  }
  return {};
}

Vec2 Trajectory::end_point() const {
  if (segments.empty()) return {};
  const auto& s = segments.back().samples;
  if (s.empty()) return {};
  return {s.back()[1], s.back()[2]};
}

double Trajectory::end_time() const {
  if (segments.empty()) return 0.0;
  return segments.back().t_end;
}

StopCondition stop_on_sigma(int direction) {
  return {[](double, double, double y) { return y; }, direction,
          EventKind::SigmaCrossing, -1};
}

StopCondition stop_on_domain(const DomainBox& box) {
  // distance inside the box; negative once outside
  return {[box](double, double x, double y) {
            double dx = std::min(x - box.xmin, box.xmax - x);
            double dy = std::min(y - box.ymin, box.ymax - y);
            return std::min(dx, dy);
          },
          -1, EventKind::DomainExit, -1};
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr int kMaxDim = 3;
using State = std::array<double, kMaxDim>;
using Rhs = std::function<void(double t, const double* y, double* dy)>;

struct RawDense {
  double t0 = 0, h = 0;
  std::array<std::array<double, 5>, kMaxDim> c{};
  double eval(int comp, double t) const {
    double s = (t - t0) / h;
    const auto& a = c[comp];
    return a[0] + s * (a[1] + (1 - s) * (a[2] + s * (a[3] + (1 - s) * a[4])));
  }
};

struct Stepper {
  const Rhs& rhs;
  int n;
  double rtol, atol;

  // One attempted step from (t, y) with size h. On success fills y_new,
  // dense, err. k1 must hold f(t, y) (FSAL: k7 of the previous step).
  void attempt(double t, const State& y, double h, const State& k1, State& y_new,
               State& k7, RawDense& dense, double& err) const {
    State k2, k3, k4, k5, k6, tmp;
    auto stage = [&](const State& yy, double tt, State& out) { rhs(tt, yy.data(), out.data()); };
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    stage(tmp, t + c2 * h, k2);
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    stage(tmp, t + c3 * h, k3);
    for (int i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    stage(tmp, t + c4 * h, k4);
    for (int i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    stage(tmp, t + c5 * h, k5);
    for (int i = 0; i < n; ++i)
      tmp[i] = y[i] +
               h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    stage(tmp, t + h, k6);
    for (int i = 0; i < n; ++i)
      y_new[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                             a76 * k6[i]);
    stage(y_new, t + h, k7);

    err = 0.0;
    for (int i = 0; i < n; ++i) {
      double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                       e7 * k7[i]);
      double sk = atol + rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err += (ei / sk) * (ei / sk);
    }
    err = std::sqrt(err / n);

    dense.t0 = t;
    dense.h = h;
    for (int i = 0; i < n; ++i) {
      double ydiff = y_new[i] - y[i];
      double bspl = h * k1[i] - ydiff;
      dense.c[i][0] = y[i];
      dense.c[i][1] = ydiff;
      dense.c[i][2] = bspl;
      dense.c[i][3] = ydiff - h * k7[i] - bspl;
      dense.c[i][4] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                           d6 * k6[i] + d7 * k7[i]);
    }
  }
};

struct EventScan {
  double t;
  int stop_index;  // index into the stops vector
};

// Locate the earliest sign change of any stop function over one dense step.
// Samples the dense output at interior points to catch short excursions.
std::optional<EventScan> scan_events(const std::vector<StopCondition>& stops,
                                     const RawDense& dense, double event_time_tol) {
  constexpr int kSamples = 8;
  std::optional<EventScan> best;
  for (std::size_t si = 0; si < stops.size(); ++si) {
    const auto& stop = stops[si];
    double t_prev = dense.t0;
    double v_prev = stop.fn(t_prev, dense.eval(0, t_prev), dense.eval(1, t_prev));
    for (int s = 1; s <= kSamples; ++s) {
      double t_cur = dense.t0 + dense.h * s / kSamples;
      double v_cur = stop.fn(t_cur, dense.eval(0, t_cur), dense.eval(1, t_cur));
      bool crossed = false;
      if (v_prev != 0.0 && (v_prev < 0) != (v_cur < 0)) {
        if (stop.direction == 0 || (stop.direction < 0 && v_prev > 0) ||
            (stop.direction > 0 && v_prev < 0))
          crossed = true;
      } else if (v_prev != 0.0 && v_cur == 0.0) {
        if (stop.direction == 0 || (stop.direction < 0 && v_prev > 0) ||
            (stop.direction > 0 && v_prev < 0))
          crossed = true;
      }
      if (crossed) {
        // bisection + secant on the dense output
        double a = t_prev, b = t_cur, fa = v_prev, fb = v_cur;
        for (int it = 0; it < 100 && (b - a) > event_time_tol; ++it) {
          double mid;
          if (fb != fa) {
            mid = b - fb * (b - a) / (fb - fa);
            if (!(mid > a && mid < b)) mid = 0.5 * (a + b);
          } else {
            mid = 0.5 * (a + b);
          }
          double fm = stop.fn(mid, dense.eval(0, mid), dense.eval(1, mid));
          if (fa != 0.0 && (fa < 0) != (fm < 0)) {
            b = mid;
            fb = fm;
          } else {
            a = mid;
            fa = fm;
          }
        }
        double t_event = b;
        if (!best || t_event < best->t) best = EventScan{t_event, static_cast<int>(si)};
        break;  // earliest crossing of this stop found
      }
      t_prev = t_cur;
      v_prev = v_cur;
    }
  }
  return best;
}

double initial_step(const Rhs& rhs, double t0, const State& y, int n, double max_step,
                    double time_dir) {
  State dy{};
  rhs(t0, y.data(), dy.data());
  double ynorm = 0, fnorm = 0;
  for (int i = 0; i < n; ++i) {
    ynorm = std::max(ynorm, std::abs(y[i]));
    fnorm = std::max(fnorm, std::abs(dy[i]));
  }
  double h = 0.01 * std::max(ynorm, 0.1) / std::max(fnorm, 1e-8);
  return time_dir * std::min(h, max_step);
}

}  // namespace

FlowResult flow_smooth(const SmoothField& field, Vec2 start,
                       const IntegratorOptions& opts, const DomainBox& box,
                       const std::vector<StopCondition>& stops, const FlowRequest& req) {
  int n = req.with_divergence ? 3 : 2;
  double sgn = req.time_sign >= 0 ? 1.0 : -1.0;
  Rhs rhs = [&](double, const double* y, double* dy) {
    dy[0] = sgn * field.f(y[0], y[1]);
    dy[1] = sgn * field.g(y[0], y[1]);
    if (n == 3) dy[2] = sgn * field.divergence(y[0], y[1]);
  };

  std::vector<StopCondition> all_stops = stops;
  all_stops.push_back(stop_on_domain(box));

  FlowResult result;
  OrbitSegment& seg = result.segment;
  seg.mode = Mode::Upper;  // caller overwrites
  seg.t_begin = req.t0;

  Stepper stepper{rhs, n, opts.rel_tol, opts.abs_tol};
  State y{start.x, start.y, 0.0};
  double t = req.t0;
  State k1{};
  rhs(t, y.data(), k1.data());
  double h = initial_step(rhs, t, y, n, opts.max_step, 1.0);
  double t_end = req.t0 + opts.t_max;

  seg.samples.push_back({t, y[0], y[1]});

  Event end{EventKind::TimeLimit, t, y[0], y[1]};
  bool have_event = false;

  while (t < t_end) {
    h = std::min(h, t_end - t);
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      end = {EventKind::StepUnderflow, t, y[0], y[1]};
      have_event = true;
      break;
    }
    State y_new, k7;
    RawDense dense;
    double err;
    stepper.attempt(t, y, h, k1, y_new, k7, dense, err);
    if (err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      continue;
    }
    // accepted
    auto hit = scan_events(all_stops, dense, opts.event_time_tol);
    if (hit) {
      double te = hit->t;
      Event ev;
      ev.kind = all_stops[hit->stop_index].kind;
      ev.section_id = all_stops[hit->stop_index].id;
      ev.t = te;
      ev.x = dense.eval(0, te);
      ev.y = dense.eval(1, te);
      if (n == 3) result.divergence_integral = dense.eval(2, te);
      if (req.record_dense) {
        DenseStep pub{dense.t0, dense.h, {dense.c[0], dense.c[1]}};
        seg.dense.push_back(pub);
      }
      seg.samples.push_back({te, ev.x, ev.y});
      seg.t_end = te;
      seg.end_event = ev;
      result.event = ev;
      return result;
    }
    t += h;
    y = y_new;
    k1 = k7;  // FSAL
    if (n == 3) result.divergence_integral = y[2];
    if (req.record_dense) {
      DenseStep pub{dense.t0, dense.h, {dense.c[0], dense.c[1]}};
      seg.dense.push_back(pub);
      seg.samples.push_back({t, y[0], y[1]});
    } else if (seg.samples.size() < 2) {
      seg.samples.push_back({t, y[0], y[1]});
    } else {
      seg.samples.back() = {t, y[0], y[1]};
    }
    h = std::min(opts.max_step, h * std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2))));
  }

  if (!have_event) end = {EventKind::TimeLimit, t, y[0], y[1]};
  seg.samples.back() = {t, y[0], y[1]};
  seg.t_end = t;
  seg.end_event = end;
  result.event = end.kind == EventKind::TimeLimit ? std::optional<Event>{} : end;
  if (end.kind == EventKind::TimeLimit) seg.end_event = end;
  return result;
}

SmoothField reversed(const SmoothField& field) {
  return SmoothField(-field.f_expr(), -field.g_expr(), field.params());
}

PwsSystem reversed(const PwsSystem& sys) {
  return PwsSystem(reversed(sys.upper()), reversed(sys.lower()), sys.domain());
}

// ---- Filippov automaton -----------------------------------------------------

namespace {

// Sliding motion along Sigma: scalar ODE x' = Xs(x), terminated when either
// g vanishes (tangent-point boundary), the domain ends, or time runs out.
struct SlideOutcome {
  OrbitSegment segment;
  Event end{EventKind::TimeLimit};
  bool boundary = false;  // ended at a tangent boundary
};

SlideOutcome slide(const PwsSystem& sys, double x0, double t0,
                   const PwsFlowOptions& opts) {
  const auto& up = sys.upper();
  const auto& lo = sys.lower();
  Rhs rhs = [&](double, const double* y, double* dy) {
    double gu = up.g(y[0], 0.0);
    double gl = lo.g(y[0], 0.0);
    double den = gl - gu;
    if (den == 0.0) throw DomainError("sliding: degenerate denominator");
    dy[0] = (up.f(y[0], 0.0) * gl - lo.f(y[0], 0.0) * gu) / den;
  };

  std::vector<StopCondition> stops;
  stops.push_back({[&up](double, double x, double) { return up.g(x, 0.0); }, 0,
                   EventKind::SlidingExit, 0});
  stops.push_back({[&lo](double, double x, double) { return lo.g(x, 0.0); }, 0,
                   EventKind::SlidingExit, 1});
  stops.push_back({[box = sys.domain()](double, double x, double) {
                     return std::min(x - box.xmin, box.xmax - x);
                   },
                   -1, EventKind::DomainExit, -1});
  for (const auto& s : opts.extra_stops) stops.push_back(s);

  SlideOutcome out;
  OrbitSegment& seg = out.segment;
  seg.mode = Mode::Sliding;
  seg.t_begin = t0;

  Stepper stepper{rhs, 1, opts.integ.rel_tol, opts.integ.abs_tol};
  State y{x0, 0.0, 0.0};
  double t = t0;
  State k1{};
  rhs(t, y.data(), k1.data());
  double h = initial_step(rhs, t, y, 1, opts.integ.max_step, 1.0);
  double t_end = t0 + opts.integ.t_max;
  seg.samples.push_back({t, x0, 0.0});

  // wrap stop fns so they see (t, x, 0)
  auto eval_stop = [&](const StopCondition& s, double tt, double xx) {
    return s.fn(tt, xx, 0.0);
  };

  while (t < t_end) {
    h = std::min(h, t_end - t);
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      out.end = {EventKind::StepUnderflow, t, y[0], 0.0};
      break;
    }
    State y_new, k7;
    RawDense dense;
    double err;
    bool failed = false;
    try {
      stepper.attempt(t, y, h, k1, y_new, k7, dense, err);
    } catch (const DomainError&) {
      failed = true;
      err = 2.0;
    }
    if (failed || err > 1.0) {
      h *= 0.5;
      continue;
    }
    // events on the dense x(t)
    std::optional<EventScan> best;
    constexpr int kSamples = 8;
    for (std::size_t si = 0; si < stops.size(); ++si) {
      double t_prev = dense.t0;
      double v_prev = eval_stop(stops[si], t_prev, dense.eval(0, t_prev));
      for (int s = 1; s <= kSamples; ++s) {
        double t_cur = dense.t0 + dense.h * s / kSamples;
        double v_cur = eval_stop(stops[si], t_cur, dense.eval(0, t_cur));
        bool crossed = v_prev != 0.0 &&
                       ((v_prev < 0) != (v_cur < 0) || v_cur == 0.0) &&
                       (stops[si].direction == 0 ||
                        (stops[si].direction < 0 && v_prev > 0) ||
                        (stops[si].direction > 0 && v_prev < 0));
        if (crossed) {
          double a = t_prev, b = t_cur, fa = v_prev, fb = v_cur;
          for (int it = 0; it < 100 && (b - a) > opts.integ.event_time_tol; ++it) {
            double mid = (fb != fa) ? b - fb * (b - a) / (fb - fa) : 0.5 * (a + b);
            if (!(mid > a && mid < b)) mid = 0.5 * (a + b);
            double fm = eval_stop(stops[si], mid, dense.eval(0, mid));
            if (fa != 0.0 && (fa < 0) != (fm < 0)) {
              b = mid;
              fb = fm;
            } else {
              a = mid;
              fa = fm;
            }
          }
          if (!best || b < best->t) best = EventScan{b, static_cast<int>(si)};
          break;
        }
        t_prev = t_cur;
        v_prev = v_cur;
      }
    }
    if (best) {
      double te = best->t;
      double xe = dense.eval(0, te);
      Event ev;
      ev.kind = stops[best->stop_index].kind;
      ev.section_id = stops[best->stop_index].id;
      ev.t = te;
      ev.x = xe;
      ev.y = 0.0;
      seg.samples.push_back({te, xe, 0.0});
      seg.t_end = te;
      seg.end_event = ev;
      out.end = ev;
      out.boundary = ev.kind == EventKind::SlidingExit;
      return out;
    }
    t += h;
    y = y_new;
    k1 = k7;
    if (opts.record_dense) seg.samples.push_back({t, y[0], 0.0});
    h = std::min(opts.integ.max_step,
                 h * std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2))));
  }
  if (seg.samples.back()[0] != t) seg.samples.push_back({t, y[0], 0.0});
  seg.t_end = t;
  if (out.end.kind == EventKind::TimeLimit) out.end = {EventKind::TimeLimit, t, y[0], 0.0};
  seg.end_event = out.end;
  return out;
}

}  // namespace

Trajectory integrate_pws(const PwsSystem& sys, Vec2 start, const PwsFlowOptions& opts) {
  Trajectory traj;
  double t = 0.0;
  Vec2 p = start;
  const double y_band = 1e-12;

  Mode mode;
  if (p.y > y_band) {
    mode = Mode::Upper;
  } else if (p.y < -y_band) {
    mode = Mode::Lower;
  } else {
    p.y = 0.0;
    RegionClass rc = h_indicator(sys, p.x, opts.tol);
    if (rc.tag == RegionTag::Sliding) {
      mode = Mode::Sliding;
    } else if (opts.side_hint > 0) {
      mode = Mode::Upper;
    } else if (opts.side_hint < 0) {
      mode = Mode::Lower;
    } else if (rc.tag == RegionTag::Crossing) {
      mode = sys.upper().g(p.x, 0.0) > 0 ? Mode::Upper : Mode::Lower;
    } else {
      // tangency with no hint: continue on the side whose g vanishes
      mode = std::abs(sys.upper().g(p.x, 0.0)) <= std::abs(sys.lower().g(p.x, 0.0))
                 ? Mode::Upper
                 : Mode::Lower;
    }
  }

  int events = 0;
  double t_final = opts.integ.t_max;

  while (t < t_final) {
    if (++events > opts.integ.chatter_max)
      throw std::runtime_error(
          "integrate_pws: chattering guard tripped after " +
          std::to_string(opts.integ.chatter_max) + " events near (" +
          std::to_string(p.x) + ", " + std::to_string(p.y) + ")");

    if (mode == Mode::Sliding) {
      PwsFlowOptions sub = opts;
      sub.integ.t_max = t_final - t;
      SlideOutcome out = slide(sys, p.x, t, sub);
      traj.segments.push_back(std::move(out.segment));
      traj.events.push_back(out.end);
      t = traj.segments.back().t_end;
      p = {out.end.x, 0.0};
      if (!out.boundary) return traj;  // domain exit / time limit / section
      // Tangent boundary reached: continue with the side pushed into by the
      // surviving field.
      double gl = sys.lower().g(p.x, 0.0);
      double gu = sys.upper().g(p.x, 0.0);
      double other = out.end.section_id == 0 ? gl : gu;
      mode = other > 0 ? Mode::Upper : Mode::Lower;
      continue;
    }

    const SmoothField& field = mode == Mode::Upper ? sys.upper() : sys.lower();
    std::vector<StopCondition> stops;
    stops.push_back(stop_on_sigma(mode == Mode::Upper ? -1 : +1));
    for (const auto& s : opts.extra_stops) stops.push_back(s);

    IntegratorOptions io = opts.integ;
    io.t_max = t_final - t;
    FlowRequest req;
    req.record_dense = opts.record_dense;
    req.t0 = t;
    FlowResult res = flow_smooth(field, p, io, sys.domain(), stops, req);
    res.segment.mode = mode;
    traj.segments.push_back(std::move(res.segment));
    const OrbitSegment& seg = traj.segments.back();
    t = seg.t_end;
    p = {seg.samples.back()[1], seg.samples.back()[2]};

    if (!res.event) {
      traj.events.push_back(seg.end_event);  // time limit
      return traj;
    }
    Event ev = *res.event;
    if (ev.kind != EventKind::SigmaCrossing) {
      traj.events.push_back(ev);
      return traj;  // domain exit, section hit, underflow
    }

    // Sigma hit: project and classify.
    p = {ev.x, 0.0};
    double g_arr = field.g(p.x, 0.0);
    double gu = sys.upper().g(p.x, 0.0);
    double gl = sys.lower().g(p.x, 0.0);
    double h = gu * gl;

    if (std::abs(g_arr) <= opts.graze_tol) {
      Event gev = ev;
      gev.kind = EventKind::TangencyGraze;
      traj.events.push_back(gev);
      auto tp = classify_tangent_point(sys, mode == Mode::Upper ? SideId::Upper : SideId::Lower,
                                       p.x, opts.tol);
      bool visible = tp && tp->visibility == Visibility::Visible;
      if (visible) continue;  // grazing return, stay in the same mode
      if (h < -opts.tol.tol_h) {
        mode = Mode::Sliding;
        continue;
      }
      // invisible or degenerate: cross to the other side
      mode = mode == Mode::Upper ? Mode::Lower : Mode::Upper;
      continue;
    }

    if (h > opts.tol.tol_h) {
      traj.events.push_back(ev);  // genuine crossing
      mode = mode == Mode::Upper ? Mode::Lower : Mode::Upper;
      continue;
    }
    if (h < -opts.tol.tol_h) {
      Event sev = ev;
      sev.kind = EventKind::SlidingEntry;
      traj.events.push_back(sev);
      mode = Mode::Sliding;
      continue;
    }
    // |h| within the band: the other side is tangent here; treat as sliding
    Event sev = ev;
    sev.kind = EventKind::SlidingEntry;
    traj.events.push_back(sev);
    mode = Mode::Sliding;
  }
  return traj;
}

}  // namespace graze
