#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graze/field.hpp"

// Piecewise-smooth system split by the switching line y = 0, classification
// of Sigma points (crossing / sliding / tangency with multiplicity and
// visibility), and the Filippov sliding vector field.

namespace graze {

struct DomainBox {
  double xmin = -1, xmax = 1, ymin = -1, ymax = 1;
  bool contains(double x, double y) const {
    return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
  }
  double diagonal() const;
};

class PwsSystem {
 public:
  PwsSystem() = default;
  PwsSystem(SmoothField upper, SmoothField lower, DomainBox domain);

  const SmoothField& upper() const { return upper_; }
  const SmoothField& lower() const { return lower_; }
  const DomainBox& domain() const { return domain_; }

 private:
  SmoothField upper_, lower_;
  DomainBox domain_;
};

enum class SideId { Upper, Lower };
const SmoothField& side_field(const PwsSystem& sys, SideId side);

enum class RegionTag { Crossing, Sliding, Tangency };

struct RegionClass {
  RegionTag tag;
  double h_value;
};

enum class Visibility { Visible, Invisible, Left, Right };
std::string to_string(Visibility v);

struct TangentPoint {
  double x0;
  SideId side;
  int multiplicity;
  Visibility visibility;
  double leading_coefficient;  // g^(m)(x0,0) / m!
};

// A root of g(.,0) whose multiplicity could not be resolved up to max_order;
// reported as a diagnostic, never silently dropped.
struct UnresolvedRoot {
  double x0;
  SideId side;
  std::string reason;
};

struct TangentScan {
  std::vector<TangentPoint> points;
  std::vector<UnresolvedRoot> unresolved;
};

struct PwsTolerances {
  double tol_root = 1e-9;   // |g| at a polished root
  double mult_tol = 1e-6;   // relative threshold for a nonzero derivative
  double tol_h = 1e-12;     // tangency band around h = 0
  int max_order = 12;       // multiplicity search depth
  int scan_cells = 2048;    // grid cells for the root scan
};

// h(x) = g+(x,0) g-(x,0) with the tolerance band on the tangency tag.
RegionClass h_indicator(const PwsSystem& sys, double x,
                        const PwsTolerances& tol = {});

// All roots of g_side(.,0) on [a,b]: sign changes of g plus even-order touch
// points found via roots of g'. Multiplicity m is the smallest derivative
// order whose magnitude exceeds mult_tol relative to the largest derivative
// magnitude seen up to max_order.
TangentScan find_tangent_points(const PwsSystem& sys, SideId side, double a,
                                double b, const PwsTolerances& tol = {});

// Filippov sliding field X_s(x) = (f+ g- - f- g+) / (g- - g+) at (x,0).
// Requires strict sliding, h(x) < -tol_h.
double sliding_field(const PwsSystem& sys, double x,
                     const PwsTolerances& tol = {});
// Convex weight a = g- / (g- - g+); lies in [0,1] on the sliding region.
double filippov_coefficient(const PwsSystem& sys, double x);

// Local-orbit visibility rule. Odd m: the orbit graph is
// y ~ leading (x-x0)^(m+1) / ((m+1) f); visible for the upper side iff
// leading/f > 0, lower side flips. Even m: Right iff f > 0.
Visibility classify_visibility(SideId side, int m, double leading, double f_at);

// Multiplicity and leading coefficient of g_side(.,0) at a (near-)root.
// Returns nullopt when all derivatives up to max_order stay below tolerance.
std::optional<TangentPoint> classify_tangent_point(const PwsSystem& sys,
                                                   SideId side, double x0,
                                                   const PwsTolerances& tol = {});

}  // namespace graze
