#include "sl2wild/trace.hpp"

#include <cmath>

namespace sl2wild {

namespace {

struct St {
    Cx x;
    double tau; // real flat-time: t = dir e^{i theta} tau
};

St operator+(const St& a, const St& b) { return {a.x + b.x, a.tau + b.tau}; }
St operator*(double s, const St& a) { return {s * a.x, s * a.tau}; }

struct Rhs {
    const QuadDiff* d;
    Cx rot; // dir * e^{i theta}
    // branch reference for sqrt(Qt)
    mutable Cx xref, vref;
    RationalFn fq;

    St eval(const St& s) const {
        Cx v = sqrt_step(fq, xref, vref, s.x);
        Cx w = rot * d->P.eval(s.x) / v;
        double n = std::abs(w);
        if (n == 0) throw error("trace: hit a critical point");
        return {w / n, 1.0 / n};
    }
    void advance_ref(Cx xnew) {
        vref = sqrt_step(fq, xref, vref, xnew);
        xref = xnew;
    }
};

} // namespace

std::pair<Cx, Cx> t_segment(const QuadDiff& d, Cx a, Cx b, Cx va, int depth) {
    // adaptive Simpson on sqrt(Qt)/P with branch continuity through midpoints
    Cx m = 0.5 * (a + b);
    RationalFn fq{d.Qt};
    Cx vm = sqrt_step(fq, a, va, m);
    Cx vb = sqrt_step(fq, m, vm, b);
    auto g = [&](Cx x, Cx v) { return v / d.P.eval(x); };
    Cx s1 = (b - a) / 6.0 * (g(a, va) + 4.0 * g(m, vm) + g(b, vb));
    if (depth >= 24) return {s1, vb};
    // refine estimate
    Cx lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    Cx vlm = sqrt_step(fq, a, va, lm);
    Cx vrm = sqrt_step(fq, m, vm, rm);
    Cx s2 = (m - a) / 6.0 * (g(a, va) + 4.0 * g(lm, vlm) + g(m, vm)) +
            (b - m) / 6.0 * (g(m, vm) + 4.0 * g(rm, vrm) + g(b, vb));
    if (std::abs(s2 - s1) < 1e-12 * (1.0 + std::abs(s2))) return {s2 + (s2 - s1) / 15.0, vb};
    auto [l, vmid] = t_segment(d, a, m, va, depth + 1);
    auto [r, vend] = t_segment(d, m, b, vmid, depth + 1);
    return {l + r, vend};
}

Trajectory trace(const QuadDiff& d, double theta, Cx x0, int dir, const TraceOptions& opt) {
    if (d.crit.empty()) throw error("trace: QuadDiff not prepared");
    Trajectory tr;
    tr.theta = theta;
    tr.dir = dir;
    tr.approach.assign(d.crit.size(), {});

    const double cap_r = opt.capture_factor * d.radius;
    double sad_r = opt.saddle_capture > 0 ? opt.saddle_capture : 2e-4 * d.radius;
    const double max_len = opt.max_arclen_factor * d.radius;

    // refuse to start on top of a critical point
    for (auto& c : d.crit)
        if (!c.at_infinity && std::abs(x0 - c.location) < 1e-12 * d.radius)
            throw error("trace: x0 is a critical point");

    Rhs rhs;
    rhs.d = &d;
    rhs.rot = double(dir) * Cx(std::cos(theta), std::sin(theta));
    rhs.fq = RationalFn{d.Qt};
    rhs.xref = x0;
    Cx q0 = d.Qt.eval(x0);
    rhs.vref = opt.branch0 ? *opt.branch0 : std::sqrt(q0);
    if (std::abs(rhs.vref * rhs.vref - q0) > 1e-6 * (1.0 + std::abs(q0)))
        throw error("trace: branch0 does not square to Qt(x0)");
    tr.branch_start = rhs.vref;

    St y{x0, 0.0};
    if (opt.record_points) {
        tr.points.push_back(x0);
        tr.tvals.push_back(Cx(0, 0));
    }
    const Cx tdir = rhs.rot;

    // Dormand-Prince 5(4)
    static const double A[7][6] = {
        {0, 0, 0, 0, 0, 0},
        {1.0 / 5, 0, 0, 0, 0, 0},
        {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
        {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
        {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static const double B5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784,
                                 11.0 / 84, 0};
    static const double B4[7] = {5179.0 / 57600, 0, 7571.0 / 16695, 393.0 / 640,
                                 -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

    double h = 1e-3 * d.radius;
    int steps = 0;
    double since_record = 0;
    // Poincare section through x0 normal to the initial direction, for cycle
    // detection: returns are located by bisection on the step size so the
    // section is hit to integrator accuracy
    Cx section_n(0, 0);
    {
        St f0 = rhs.eval(y);
        section_n = f0.x;
    }
    auto section_s = [&](Cx x) {
        return (x - x0).real() * section_n.real() + (x - x0).imag() * section_n.imag();
    };

    auto finish = [&](EndKind kind, int ref, Cx xlast, double tau_last) {
        tr.end = {kind, ref};
        tr.final_x = xlast;
        tr.t_end = tdir * tau_last;
        if (opt.record_points && (tr.points.empty() || tr.points.back() != xlast)) {
            tr.points.push_back(xlast);
            tr.tvals.push_back(tr.t_end);
        }
        tr.branch_end = rhs.vref;
    };

    while (steps < opt.max_steps) {
        ++steps;
        if (h < 1e-14 * d.radius) throw error("trace: step size underflow");
        St k[7];
        bool stage_fail = false;
        try {
            k[0] = rhs.eval(y);
            for (int i = 1; i < 7; ++i) {
                St yi = y;
                for (int j = 0; j < i; ++j)
                    if (A[i][j] != 0) yi = yi + (h * A[i][j]) * k[j];
                k[i] = rhs.eval(yi);
            }
        } catch (const error&) {
            stage_fail = true; // stepped over a ramification point; shrink
        }
        if (stage_fail) {
            h *= 0.25;
            continue;
        }
        St y5 = y, y4 = y;
        for (int i = 0; i < 7; ++i) {
            if (B5[i] != 0) y5 = y5 + (h * B5[i]) * k[i];
            if (B4[i] != 0) y4 = y4 + (h * B4[i]) * k[i];
        }
        double sc = opt.rk_tol * (1.0 + std::abs(y.x));
        double err = std::abs(y5.x - y4.x) / sc + std::abs(y5.tau - y4.tau) / (opt.rk_tol * (1.0 + y5.tau));
        if (err > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            continue;
        }
        // accept
        try {
            rhs.advance_ref(y5.x);
        } catch (const error&) {
            // ref continuation crossed a zero: treat as arrival at a saddle
            double dist;
            const CriticalPoint* s = d.nearest_saddle(y5.x, &dist);
            if (s && dist < 10 * sad_r)
                return finish(EndKind::Saddle, int(s - d.crit.data()), y5.x, y5.tau), tr;
            throw;
        }
        St yprev = y;
        Cx xold = y.x;
        y = y5;
        tr.arclen += h;
        since_record += h;
        if (opt.record_points && since_record >= 2e-3 * d.radius) {
            tr.points.push_back(y.x);
            tr.tvals.push_back(tdir * y.tau);
            since_record = 0;
        }
        h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
        h = std::min(h, 0.02 * d.radius);

        // ---- termination checks ----
        if (std::abs(y.x) > d.radius) return finish(EndKind::Boundary, -1, y.x, y.tau), tr;

        for (size_t i = 0; i < d.crit.size(); ++i) {
            const auto& c = d.crit[i];
            if (c.at_infinity) continue;
            double dist = std::abs(y.x - c.location);
            if (c.is_saddle()) {
                if (dist < tr.approach[i].dist) {
                    tr.approach[i].dist = dist;
                    Cx rel = c.location - y.x;
                    Cx vel = y.x - xold;
                    tr.approach[i].side = vel.real() * rel.imag() - vel.imag() * rel.real();
                }
                double hit_r = opt.use_holes ? std::max(d.hole_radius[i], sad_r) : sad_r;
                if (dist < hit_r)
                    return finish(opt.use_holes ? EndKind::SaddleHole : EndKind::Saddle, int(i),
                                  y.x, y.tau),
                           tr;
            } else if (dist < cap_r) {
                // capture only when heading inward
                Cx vel = y.x - xold;
                if ((vel.real() * (y.x - c.location).real() +
                     vel.imag() * (y.x - c.location).imag()) < 0)
                    return finish(EndKind::Equilibrium, int(i), y.x, y.tau), tr;
            }
        }
        if (opt.use_holes) {
            // generic |btilde| >= 1/2 exit away from any saddle counts as boundary
            if (d.btilde_abs(y.x) >= 0.5) {
                double dist;
                const CriticalPoint* s = d.nearest_saddle(y.x, &dist);
                if (s && dist < 3.0 * d.hole_radius[s - d.crit.data()] + sad_r)
                    return finish(EndKind::SaddleHole, int(s - d.crit.data()), y.x, y.tau), tr;
                return finish(EndKind::Boundary, -1, y.x, y.tau), tr;
            }
        }
        // cycle: section crossing in the forward sense near the start point
        if (tr.arclen > 0.05 * d.radius && section_s(xold) < 0 && section_s(y.x) >= 0 &&
            std::abs(y.x - x0) < 0.05 * d.radius) {
            // locate the crossing by bisection on the sub-step size from the
            // previous accepted state
            St base = yprev;
            double lo = 0, hi = h;
            St hit = y;
            for (int it = 0; it < 50; ++it) {
                double mid = 0.5 * (lo + hi);
                // single RK step of size mid from base
                St km[7];
                km[0] = rhs.eval(base);
                bool ok = true;
                try {
                    for (int i2 = 1; i2 < 7; ++i2) {
                        St yi = base;
                        for (int j2 = 0; j2 < i2; ++j2)
                            if (A[i2][j2] != 0) yi = yi + (mid * A[i2][j2]) * km[j2];
                        km[i2] = rhs.eval(yi);
                    }
                } catch (const error&) {
                    ok = false;
                }
                if (!ok) break;
                St ym = base;
                for (int i2 = 0; i2 < 7; ++i2)
                    if (B5[i2] != 0) ym = ym + (mid * B5[i2]) * km[i2];
                if (section_s(ym.x) >= 0) {
                    hi = mid;
                    hit = ym;
                } else {
                    lo = mid;
                }
            }
            if (std::abs(hit.x - x0) < opt.cycle_tol)
                return finish(EndKind::Cycle, -1, hit.x, hit.tau), tr;
        }
        if (tr.arclen > max_len) return finish(EndKind::Undetermined, -1, y.x, y.tau), tr;
    }
    tr.end = {EndKind::Undetermined, -1};
    tr.final_x = y.x;
    tr.t_end = tdir * y.tau;
    tr.branch_end = rhs.vref;
    return tr;
}

} // namespace sl2wild
