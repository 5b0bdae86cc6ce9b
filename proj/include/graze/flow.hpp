#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "graze/pws.hpp"

// Event-driven integration: adaptive Dormand-Prince 5(4) with quartic dense
// output, event localization on the dense output, Filippov sliding motion,
// and the hybrid upper/lower/sliding automaton.

namespace graze {

struct IntegratorOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.25;
  double event_time_tol = 1e-12;
  double t_max = 200.0;
  int chatter_max = 10000;  // hybrid events before aborting
};

enum class EventKind {
  SigmaCrossing,
  SlidingEntry,
  SlidingExit,
  TangencyGraze,
  SectionHit,
  DomainExit,
  TimeLimit,
  StepUnderflow,
};
std::string to_string(EventKind k);

struct Event {
  EventKind kind;
  double t = 0;
  double x = 0, y = 0;
  int section_id = -1;  // for SectionHit
};

enum class Mode { Upper, Lower, Sliding };
std::string to_string(Mode m);

// One accepted integrator step with its dense-output coefficients
// (y(t0 + s h) = c0 + s(c1 + (1-s)(c2 + s(c3 + (1-s) c4))), per component).
struct DenseStep {
  double t0, h;
  std::array<std::array<double, 5>, 2> c;  // [component][coefficient]
  double eval(int comp, double t) const {
    double s = (t - t0) / h;
    const auto& a = c[comp];
    return a[0] + s * (a[1] + (1 - s) * (a[2] + s * (a[3] + (1 - s) * a[4])));
  }
};

struct OrbitSegment {
  Mode mode = Mode::Upper;
  std::vector<std::array<double, 3>> samples;  // (t, x, y)
  std::vector<DenseStep> dense;                // empty in endpoints-only runs
  Event end_event{EventKind::TimeLimit};
  double t_begin = 0, t_end = 0;

  // Dense query; valid for t in [t_begin, t_end] when dense data was kept.
  Vec2 at(double t) const;
};

struct Trajectory {
  std::vector<OrbitSegment> segments;
  std::vector<Event> events;
  Vec2 end_point() const;
  double end_time() const;
};

// A stop condition for smooth flow: the scalar function's sign change
// (honoring `direction`) halts integration. direction -1: + -> -,
// +1: - -> +, 0: either.
struct StopCondition {
  std::function<double(double t, double x, double y)> fn;
  int direction = 0;
  EventKind kind = EventKind::SectionHit;
  int id = -1;
};

StopCondition stop_on_sigma(int direction);
StopCondition stop_on_domain(const DomainBox& box);

struct FlowRequest {
  bool record_dense = true;        // keep dense blocks and samples
  bool with_divergence = false;    // augment with  q' = div f  (exp integral)
  double t0 = 0.0;
  double time_sign = 1.0;          // -1 integrates the time-reversed field
};

struct FlowResult {
  OrbitSegment segment;
  std::optional<Event> event;  // empty when t_max was reached
  double divergence_integral = 0.0;
};

// Integrate one smooth field from `start` until the first triggered stop
// condition, t_max, or leaving `box` (the box check is built in).
FlowResult flow_smooth(const SmoothField& field, Vec2 start,
                       const IntegratorOptions& opts, const DomainBox& box,
                       const std::vector<StopCondition>& stops,
                       const FlowRequest& req = {});

struct PwsFlowOptions {
  IntegratorOptions integ;
  PwsTolerances tol;
  double graze_tol = 1e-8;     // |g_arriving| below this at a Sigma hit grazes
  int side_hint = 0;           // +1 upper / -1 lower when starting on Sigma
  bool record_dense = true;
  std::vector<StopCondition> extra_stops;  // e.g. Poincare sections (terminal)
};

// Filippov integration of the whole PWS system. Alternates smooth flow and
// sliding motion; events are recorded in order.
Trajectory integrate_pws(const PwsSystem& sys, Vec2 start,
                         const PwsFlowOptions& opts);

// Time-reversed copy (both fields negated). Sliding regions are preserved;
// attracting and repelling sliding swap roles.
PwsSystem reversed(const PwsSystem& sys);
SmoothField reversed(const SmoothField& field);

}  // namespace graze
