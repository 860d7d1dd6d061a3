#pragma once

#include "sl2wild/par.hpp"
#include "sl2wild/trace.hpp"

namespace sl2wild {

enum class ZoneKind { Sepal, AlphaOmega, Center, Annular };

inline const char* zone_kind_name(ZoneKind z) {
    switch (z) {
        case ZoneKind::Sepal: return "sepal";
        case ZoneKind::AlphaOmega: return "alpha-omega";
        case ZoneKind::Center: return "center";
        case ZoneKind::Annular: return "annular";
    }
    return "?";
}

struct ZoneInfo {
    int id = -1;
    ZoneKind kind = ZoneKind::Sepal;
    int alpha = -1, omega = -1; // crit indices of the limit equilibria
    std::vector<int> cells;
    // strip data (AlphaOmega kind, including folded saddle sectors)
    double delta_min = 0, delta_max = 0; // Im(e^{-i theta} t) offset range
    Cx period = Cx(0, 0);                // complex transversal period (when computable)
    double theta_star = 0;               // transversal angle, arg(period) mod pi
    Cx t_anchor_lo = Cx(0, 0), t_anchor_hi = Cx(0, 0); // t at the bounding structures
    int anchor_lo_cell = -1, anchor_hi_cell = -1;
    std::vector<int> touched_saddles; // saddle crit-indices whose hole bounds this zone
    Cx gate_anchor = Cx(0, 0);
    Cx midpoint = Cx(0, 0);              // t-midpoint of the transversal
    bool midpoint_valid = false;
    int saddle_a = -1, saddle_b = -1;    // bounding saddles (-1: boundary/hole structure)
    std::vector<Cx> gate_path;
    std::vector<Cx> transversal;
};

struct LagoonInfo {
    int id = -1;
    int equilibrium = -1;
    std::vector<int> cells;
};

struct PetalInfo {
    int id = -1;
    int zone = -1;
    int side = 0; // 0: whole zone (sepal); -1/+1: strip half below/above the gate
    std::vector<int> cells;
    int lagoon_neg = -1, lagoon_pos = -1; // lagoons met at the alpha/omega ends
    Cx base_neg = Cx(0, 0), base_pos = Cx(0, 0); // base point representatives
    int sector_saddle = -1;  // saddle whose hyperbolic sector this petal contains
};

struct AtlasOptions {
    int mesh_n = 120;
    TraceOptions trace;
    Exec exec = Exec::Parallel;
    bool build_fetg = true; // lagoon structure (the expensive sweep)
    AtlasOptions() { trace.record_points = false; trace.use_holes = true; }
};

struct FoliationAtlas {
    QuadDiff d;
    double theta = 0;
    bool stable = true;
    Trajectory witness; // a saddle trajectory when unstable

    // mesh over [-R,R]^2, cell centers, index i + n*j
    int n = 0;
    double h = 0;
    std::vector<int8_t> cellstate; // 0 outside, 1 alive, 2 hole, 3 near-equilibrium, 4 failed
    std::vector<TraceEnd> end_minus, end_plus;
    std::vector<int> zone_of;   // -1: none (escape/fail)
    std::vector<double> delta;  // strip offset per cell (zone cells)
    std::vector<Cx> tval;       // complex t relative to the zone root (zone cells)
    std::vector<Cx> cellbranch; // sqrt(Qt) branch at the cell, zone-root continued
    std::vector<uint8_t> fetg;  // fat extended transverse graph membership
    std::vector<int> lagoon_of; // -1: FETG or not applicable

    std::vector<Trajectory> separatrices;
    std::vector<int> sep_owner; // crit index per separatrix

    std::vector<ZoneInfo> zones;
    std::vector<LagoonInfo> lagoons;
    std::vector<PetalInfo> petals;

    int idx(int i, int j) const { return i + n * j; }
    Cx cell_center(int c) const {
        int i = c % n, j = c / n;
        return Cx(-d.radius + (i + 0.5) * h, -d.radius + (j + 0.5) * h);
    }
    int cell_at(Cx x) const {
        int i = int(std::floor((x.real() + d.radius) / h));
        int j = int(std::floor((x.imag() + d.radius) / h));
        if (i < 0 || j < 0 || i >= n || j >= n) return -1;
        return idx(i, j);
    }
    int count_zones(ZoneKind k) const {
        int c = 0;
        for (auto& z : zones) c += (z.kind == k);
        return c;
    }
    int gate_count() const {
        int c = 0;
        for (auto& z : zones) c += (z.kind == ZoneKind::AlphaOmega);
        return c;
    }
};

// Separatrices of all finite saddles: 2|nu| trajectories seeded along the
// asymptotic directions. d must be prepared.
std::vector<Trajectory> separatrices(const QuadDiff& d, double theta,
                                     const TraceOptions& opt = {}, std::vector<int>* owner = nullptr);

// Full zone/gate/petal/lagoon decomposition at a fixed rotation angle.
FoliationAtlas decompose(const QuadDiff& d, double theta, const AtlasOptions& opt = {});

struct SaddleConnection {
    int saddle_a = -1, saddle_b = -1;
    int direction_index = -1; // which separatrix of saddle_a
    double theta = 0;         // angle at which the connection is horizontal
    Cx period = Cx(0, 0);
    Cx square_period = Cx(0, 0);
};

std::vector<SaddleConnection> saddle_connections(const QuadDiff& d, int theta_samples = 181,
                                                 double tol = 1e-10);

struct StabilityWindow {
    double lo = 0, hi = 0;
};

// Maximal stable theta-intervals within (-pi/2, pi/2), bisection-refined.
std::vector<StabilityWindow> stability_scan(const QuadDiff& d, int grid = 64,
                                            double refine_tol = 1e-6, Exec exec = Exec::Parallel);

// Union over sampled stable rotations of a continuously tracked petal.
struct EnlargedPetal {
    int petal_ref = -1; // petal id at the first sample
    std::vector<int> cells;
    std::vector<double> thetas;
    bool complete = true; // tracking kept continuity through all samples
};

std::vector<EnlargedPetal> enlarged_petals(const QuadDiff& d, const StabilityWindow& w,
                                           int theta_samples = 7, const AtlasOptions& opt = {});

// Periodic/parabolic domains of the equilibria and the core.
struct CoreDomains {
    // per equilibrium (crit index): member cells of its periodic/parabolic domain
    std::vector<std::pair<int, std::vector<int>>> domains;
    std::vector<int> core_cells;
    int mesh_n = 0;
    double h = 0, radius = 0;
};

CoreDomains core_and_domains(const QuadDiff& d, int theta_samples = 12,
                             const AtlasOptions& opt = {});

// Numeric detection of the separating directions at an equilibrium: bisection
// on the escape/converge transition around a small circle (independent of the
// closed-form separating_directions).
std::vector<double> measure_separating_directions(const QuadDiff& d, int crit_index, double theta,
                                                  double r0, double tol = 1e-8);

} // namespace sl2wild
