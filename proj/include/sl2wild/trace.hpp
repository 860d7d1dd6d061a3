#pragma once

#include "sl2wild/quaddiff.hpp"

namespace sl2wild {

enum class EndKind {
    Equilibrium, // captured at a pole of Delta (infinite t-time end)
    Saddle,      // arrived at a saddle point (finite t-time)
    SaddleHole,  // entered the |btilde| >= 1/2 hole around a saddle
    Boundary,    // left the working domain
    Cycle,       // closed up on itself (periodic trajectory)
    Undetermined // budget exhausted
};

struct TraceEnd {
    EndKind kind = EndKind::Undetermined;
    int ref = -1; // index into QuadDiff::crit where applicable
};

// closest-approach record towards a saddle, for connection shooting:
// side = sign of the cross product velocity x (saddle - x) at closest approach
struct SaddleApproach {
    double dist = std::numeric_limits<double>::max();
    double side = 0;
};

struct Trajectory {
    std::vector<Cx> points;
    std::vector<Cx> tvals; // cumulative t = int sqrt(Delta), t(start) = 0
    double theta = 0;
    int dir = +1;
    TraceEnd end;
    Cx final_x = Cx(0, 0); // last point reached (always set)
    Cx t_end = Cx(0, 0);   // total t increment along the trajectory
    Cx branch_start = Cx(0, 0), branch_end = Cx(0, 0); // sqrt(Qt) branch values
    double arclen = 0;
    std::vector<SaddleApproach> approach; // indexed like QuadDiff::crit
};

struct TraceOptions {
    double rk_tol = 1e-9;
    double capture_factor = 1e-3;   // equilibrium capture radius = factor * radius
    double saddle_capture = 0.0;    // point-saddle hit radius (0: derived default)
    bool use_holes = false;         // terminate on the |btilde| >= 1/2 saddle holes
    double cycle_tol = 1e-6;
    int max_steps = 120000;
    double max_arclen_factor = 80.0;
    bool record_points = true;
    std::optional<Cx> branch0;      // sqrt(Qt) at x0 (default principal)
};

// Real-time trajectory of dir * e^{i theta} P / sqrt(Qt), arc-length
// normalized, with sqrt branch continuation. `d` must be prepared.
Trajectory trace(const QuadDiff& d, double theta, Cx x0, int dir, const TraceOptions& opt = {});

// t-value of the straight segment [a,b] by quadrature with branch continuity;
// `va` = sqrt(Qt) branch at a. Returns (integral of sqrt(Qt)/P dx, branch at b).
std::pair<Cx, Cx> t_segment(const QuadDiff& d, Cx a, Cx b, Cx va, int depth = 0);

} // namespace sl2wild
