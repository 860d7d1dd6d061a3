#pragma once

#include <optional>
#include <vector>

#include "sl2wild/roots.hpp"
#include "sl2wild/sqrt_path.hpp"

namespace sl2wild {

enum class CritKind { Parabolic, Center, Focus, Saddle };

inline const char* crit_kind_name(CritKind k) {
    switch (k) {
        case CritKind::Parabolic: return "parabolic";
        case CritKind::Center: return "center";
        case CritKind::Focus: return "focus";
        case CritKind::Saddle: return "saddle";
    }
    return "?";
}

struct CriticalPoint {
    Cx location;
    int p_mult = 0;      // multiplicity as a root of P
    int q_mult = 0;      // multiplicity as a root of Qtilde
    int nu2 = 0;         // twice the rank: pole order of Delta = nu2 + 2
    CritKind kind = CritKind::Saddle;
    Cx mu = Cx(0, 0);    // squared residue (rank 0; also the leading Delta coefficient)
    bool at_infinity = false;

    bool is_equilibrium() const { return nu2 >= 0 && !at_infinity; }
    bool is_saddle() const { return nu2 < 0 && !at_infinity; }
    int separatrix_count() const { return -nu2; } // 2|nu| for saddles
};

// Meromorphic quadratic differential Delta = Qtilde / P^2 (dx)^2 on a disc
// |x| < radius, with cached critical data.
struct QuadDiff {
    PolyC Qt;
    PolyC P;
    double radius = 1.0;

    std::vector<CriticalPoint> crit;  // finite points, plus infinity appended last
    std::vector<double> hole_radius;  // per crit entry: |btilde| >= 1/2 hole (saddles)
    double root_tol = 1e-7;

    QuadDiff() = default;
    QuadDiff(PolyC qt, PolyC p, double r) : Qt(std::move(qt)), P(std::move(p)), radius(r) {}

    Cx delta(Cx x) const { // value of Qtilde/P^2
        Cx pv = P.eval(x);
        return Qt.eval(x) / (pv * pv);
    }

    // btilde = P Qt' / (4 Qt^{3/2}); only |btilde| is ever needed
    double btilde_abs(Cx x) const {
        Cx qv = Qt.eval(x);
        double q = std::abs(qv);
        if (q == 0) return std::numeric_limits<double>::infinity();
        return std::abs(P.eval(x) * Qt.derivative().eval(x)) / (4.0 * q * std::sqrt(q));
    }

    RationalFn sqrt_fn() const { // f with sqrt(f) = sqrt(Delta) * P/|..|: use Qt only
        return RationalFn{Qt};
    }

    const CriticalPoint* nearest_equilibrium(Cx x, double* dist = nullptr) const;
    const CriticalPoint* nearest_saddle(Cx x, double* dist = nullptr) const;
};

// Critical points from the root clusters of P and Qt; rank nu from the pole
// order 2 nu + 2 of Delta. Marked regular points can be injected as rank -1
// saddles. Throws on ambiguous root clustering.
std::vector<CriticalPoint> critical_points(const QuadDiff& d,
                                           const std::vector<Cx>& marked = {});

// Fill d.crit and d.hole_radius (computes critical_points if crit empty).
void prepare(QuadDiff& d, const std::vector<Cx>& marked = {});

// Local model data at a critical point: Delta ~ c (x-a)^{n} (dx)^2.
// Returns c and n = q_mult - 2 p_mult.
std::pair<Cx, int> local_model(const QuadDiff& d, const CriticalPoint& cp);

// Asymptotic separating directions at a critical point for angle theta:
// phi_r = (theta + r pi - arg(c)/2) / (n/2 + 1), r = 0 .. n+1.
std::vector<double> separating_directions(const QuadDiff& d, const CriticalPoint& cp,
                                          double theta);

// X_eps region report: {|x| < radius, |btilde| < 1/2} connectivity and
// whether all singularities (roots of P) lie inside.
struct MixedDomainReport {
    bool connected = false;
    bool singularities_inside = false;
    int component_count = 0;
    int grid_n = 0;
    std::vector<uint8_t> inside; // grid_n x grid_n occupancy, row-major
    double h = 0;
};

MixedDomainReport mixed_domain(const PolyC& P, const PolyC& Qt, double delta_x, int grid_n = 201);

} // namespace sl2wild
