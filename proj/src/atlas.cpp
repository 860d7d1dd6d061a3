#include "sl2wild/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

namespace sl2wild {

namespace {

bool is_escape(const TraceEnd& e) {
    return e.kind == EndKind::Boundary || e.kind == EndKind::Saddle ||
           e.kind == EndKind::SaddleHole;
}
bool is_eq(const TraceEnd& e) { return e.kind == EndKind::Equilibrium; }

double cross2(Cx u, Cx v) { return u.real() * v.imag() - u.imag() * v.real(); }

bool seg_intersect(Cx a, Cx b, Cx c, Cx d) {
    double d1 = cross2(b - a, c - a), d2 = cross2(b - a, d - a);
    double d3 = cross2(d - c, a - c), d4 = cross2(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

double point_seg_dist(Cx p, Cx a, Cx b) {
    Cx ab = b - a;
    double L2 = std::norm(ab);
    if (L2 == 0) return std::abs(p - a);
    double t = std::clamp(((p - a).real() * ab.real() + (p - a).imag() * ab.imag()) / L2, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

// blocking structure for flood fills: rays from critical points along
// separating directions (sub-mesh bands near critical points)
struct BlockRays {
    struct Ray {
        Cx origin;
        Cx tip;
    };
    std::vector<Ray> rays;
    std::vector<Cx> centers;  // critical points with their block radii
    std::vector<double> radii;

    bool blocked(Cx p, Cx q) const {
        for (auto& r : rays)
            if (seg_intersect(p, q, r.origin, r.tip)) return true;
        for (size_t i = 0; i < centers.size(); ++i)
            if (point_seg_dist(centers[i], p, q) < radii[i]) return true;
        return false;
    }
};

BlockRays make_block_rays(const QuadDiff& d, double, double cap_r) {
    // proximity-only blocking: flood fills never step across a critical point
    BlockRays b;
    for (size_t ci = 0; ci < d.crit.size(); ++ci) {
        const auto& c = d.crit[ci];
        if (c.at_infinity) continue;
        b.centers.push_back(c.location);
        b.radii.push_back(c.is_saddle() ? std::max(d.hole_radius[ci], 1e-3 * d.radius)
                                        : std::max(1.2 * cap_r, 1e-3 * d.radius));
    }
    return b;
}

// landing-direction label at a parabolic equilibrium: index of the nearest
// separating direction of the fan at the given angle; -1 when not applicable
int landing_label(const QuadDiff& d, double theta, const TraceEnd& e, Cx final_x) {
    if (e.kind != EndKind::Equilibrium || e.ref < 0) return -1;
    const auto& c = d.crit[size_t(e.ref)];
    if (c.kind != CritKind::Parabolic) return -1;
    auto dirs = separating_directions(d, c, theta);
    if (dirs.empty()) return -1;
    double phi = std::arg(final_x - c.location);
    int best = 0;
    double bd = 10, off = 0;
    for (size_t i = 0; i < dirs.size(); ++i) {
        double r = std::remainder(phi - dirs[i], 2 * M_PI);
        if (std::abs(r) < bd) { bd = std::abs(r); best = int(i); off = r; }
    }
    // side bit: adjacent sepals can share both fan directions (rank 1) and are
    // told apart by the side from which trajectories hug the direction
    return 2 * best + (off > 0 ? 1 : 0);
}

// t-offset of a point near a saddle from the saddle itself (local model head
// plus numeric tail), branch-matched to v_at_x (the sqrt(Qt) branch at x).
Cx t_from_saddle(const QuadDiff& d, const CriticalPoint& c, Cx x, Cx v_at_x) {
    auto [cc, nn] = local_model(d, c);
    double w = nn / 2.0;
    Cx rel = x - c.location;
    double r = std::abs(rel);
    double phi = std::arg(rel);
    double delta = 1e-6 * r;
    Cx xhead = c.location + delta * (rel / r);
    auto [t_back, v_head] = t_segment(d, x, xhead, v_at_x); // int_x^{головы}
    // branch sign of the local model at the head point
    Cx sc = std::sqrt(cc);
    Cx g_model = sc * std::pow(delta, w) * std::polar(1.0, w * phi);
    Cx g_num = v_head / d.P.eval(xhead);
    double sgn = (std::abs(g_num - g_model) <= std::abs(g_num + g_model)) ? 1.0 : -1.0;
    Cx head = sgn * sc * std::polar(std::pow(delta, w + 1.0), (w + 1.0) * phi) / (w + 1.0);
    return head - t_back;
}

struct SepSeed {
    Cx seed;
    int dir;
    Cx branch; // sqrt(Qt) at seed
    double phi;
};

SepSeed separatrix_seed(const QuadDiff& d, size_t ci, double phi, double theta, bool use_holes) {
    const auto& c = d.crit[ci];
    double sep = 2 * d.radius;
    for (auto& o : d.crit) {
        if (o.at_infinity || &o == &c) continue;
        sep = std::min(sep, std::abs(o.location - c.location));
    }
    double r0 = std::max(2e-3 * d.radius, use_holes ? 1.15 * d.hole_radius[ci] : 0.0);
    if (r0 > 0.45 * sep)
        throw error("separatrices: seeding radius collides with another critical point");
    Cx seed = c.location + r0 * Cx(std::cos(phi), std::sin(phi));
    Cx v = std::sqrt(d.Qt.eval(seed));
    Cx wfield = Cx(std::cos(theta), std::sin(theta)) * d.P.eval(seed) / v;
    double along = wfield.real() * std::cos(phi) + wfield.imag() * std::sin(phi);
    int dir = along >= 0 ? +1 : -1;
    return {seed, dir, v, phi};
}

} // namespace

std::vector<Trajectory> separatrices(const QuadDiff& d, double theta, const TraceOptions& opt,
                                     std::vector<int>* owner) {
    if (d.crit.empty()) throw error("separatrices: QuadDiff not prepared");
    std::vector<Trajectory> out;
    if (owner) owner->clear();
    for (size_t ci = 0; ci < d.crit.size(); ++ci) {
        const auto& c = d.crit[ci];
        if (!c.is_saddle()) continue;
        auto dirs = separating_directions(d, c, theta);
        for (double phi : dirs) {
            SepSeed s = separatrix_seed(d, ci, phi, theta, opt.use_holes);
            TraceOptions o = opt;
            o.record_points = true;
            o.branch0 = s.branch;
            Trajectory tr = trace(d, theta, s.seed, s.dir, o);
            out.push_back(std::move(tr));
            if (owner) owner->push_back(int(ci));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

FoliationAtlas decompose(const QuadDiff& din, double theta, const AtlasOptions& opt) {
    FoliationAtlas A;
    A.d = din;
    if (A.d.crit.empty()) prepare(A.d);
    A.theta = theta;

    bool have_eq = false;
    for (auto& c : A.d.crit) have_eq = have_eq || c.is_equilibrium();
    if (!have_eq) throw error("decompose: no equilibrium inside the domain");

    const double R = A.d.radius;
    const double cap_r = opt.trace.capture_factor * R;

    // 1. separatrices + instability witness
    TraceOptions sep_opt = opt.trace;
    sep_opt.use_holes = true;
    sep_opt.record_points = true;
    A.separatrices = separatrices(A.d, theta, sep_opt, &A.sep_owner);
    for (auto& s : A.separatrices) {
        if (is_escape(s.end)) { // other end is the seeding saddle: a saddle trajectory
            A.stable = false;
            A.witness = s;
            return A;
        }
    }

    // 2. mesh
    A.n = opt.mesh_n;
    A.h = 2 * R / A.n;
    size_t N = size_t(A.n) * A.n;
    A.cellstate.assign(N, 0);
    A.end_minus.assign(N, {});
    A.end_plus.assign(N, {});
    A.zone_of.assign(N, -1);
    A.delta.assign(N, 0.0);
    A.tval.assign(N, Cx(0, 0));
    A.cellbranch.assign(N, Cx(0, 0));
    A.fetg.assign(N, 0);
    A.lagoon_of.assign(N, -1);

    for (size_t cidx = 0; cidx < N; ++cidx) {
        Cx x = A.cell_center(int(cidx));
        if (std::abs(x) >= R - 0.5 * A.h) continue;
        int8_t st = 1;
        for (size_t ci = 0; ci < A.d.crit.size(); ++ci) {
            const auto& c = A.d.crit[ci];
            if (c.at_infinity) continue;
            double dist = std::abs(x - c.location);
            if (c.is_saddle() && dist <= A.d.hole_radius[ci] + 0.45 * A.h) st = 2;
            if (c.is_equilibrium() && dist <= std::max(2 * cap_r, 1e-3 * R)) st = 3;
        }
        A.cellstate[cidx] = st;
    }

    // 3. signature sweep (parallel kernel; each cell writes its own slot)
    TraceOptions mesh_opt = opt.trace;
    mesh_opt.record_points = false;
    mesh_opt.use_holes = true;
    std::vector<uint8_t> esc_both(N, 0);
    std::vector<int8_t> lab_plus(N, -1), lab_minus(N, -1);
    parallel_for(N, opt.exec, [&](size_t cidx) {
        if (A.cellstate[cidx] != 1) return;
        Cx x = A.cell_center(int(cidx));
        try {
            Trajectory tp = trace(A.d, theta, x, +1, mesh_opt);
            Trajectory tm = trace(A.d, theta, x, -1, mesh_opt);
            A.end_plus[cidx] = tp.end;
            A.end_minus[cidx] = tm.end;
            lab_plus[cidx] = int8_t(landing_label(A.d, theta, tp.end, tp.final_x));
            lab_minus[cidx] = int8_t(landing_label(A.d, theta, tm.end, tm.final_x));
            if (is_escape(tp.end) && is_escape(tm.end)) esc_both[cidx] = 1;
        } catch (const error&) {
            A.cellstate[cidx] = 4;
        }
    });

    for (size_t cidx = 0; cidx < N; ++cidx) {
        if (esc_both[cidx]) {
            A.stable = false;
            TraceOptions wopt = mesh_opt;
            wopt.record_points = true;
            A.witness = trace(A.d, theta, A.cell_center(int(cidx)), +1, wopt);
            return A;
        }
    }

    // 4. zone flood fill (same signature, no crossing of sub-mesh bands)
    BlockRays rays = make_block_rays(A.d, theta, cap_r);
    auto same_sig = [&](size_t a, size_t b) {
        auto key = [&](size_t c) {
            int al = is_eq(A.end_minus[c]) ? A.end_minus[c].ref : -9;
            int om = is_eq(A.end_plus[c]) ? A.end_plus[c].ref : -9;
            bool cyc = A.end_minus[c].kind == EndKind::Cycle && A.end_plus[c].kind == EndKind::Cycle;
            return std::tuple<int, int, int, int, bool>(al, om, lab_minus[c], lab_plus[c], cyc);
        };
        return key(a) == key(b);
    };
    auto is_zone_cell = [&](size_t c) {
        if (A.cellstate[c] != 1) return false;
        bool ee = is_eq(A.end_minus[c]) && is_eq(A.end_plus[c]);
        bool cyc = A.end_minus[c].kind == EndKind::Cycle && A.end_plus[c].kind == EndKind::Cycle;
        return ee || cyc;
    };
    int nz = 0;
    for (size_t s = 0; s < N; ++s) {
        if (!is_zone_cell(s) || A.zone_of[s] >= 0) continue;
        std::deque<size_t> q{s};
        A.zone_of[s] = nz;
        while (!q.empty()) {
            size_t cur = q.front();
            q.pop_front();
            int i = int(cur % A.n), j = int(cur / A.n);
            const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
            for (int t = 0; t < 4; ++t) {
                int ni = i + di[t], nj = j + dj[t];
                if (ni < 0 || nj < 0 || ni >= A.n || nj >= A.n) continue;
                size_t nc = size_t(A.idx(ni, nj));
                if (!is_zone_cell(nc) || A.zone_of[nc] >= 0 || !same_sig(cur, nc)) continue;
                if (rays.blocked(A.cell_center(int(cur)), A.cell_center(int(nc)))) continue;
                A.zone_of[nc] = nz;
                q.push_back(nc);
            }
        }
        ++nz;
    }
    A.zones.assign(nz, {});
    for (int z = 0; z < nz; ++z) A.zones[z].id = z;
    for (size_t c = 0; c < N; ++c)
        if (A.zone_of[c] >= 0) A.zones[A.zone_of[c]].cells.push_back(int(c));

    // drop tiny speckle zones (unresolved slivers)
    {
        std::vector<int> remap(nz, -1);
        std::vector<ZoneInfo> kept;
        for (auto& z : A.zones) {
            if (int(z.cells.size()) >= 8) {
                remap[z.id] = int(kept.size());
                ZoneInfo zi = z;
                zi.id = int(kept.size());
                kept.push_back(std::move(zi));
            }
        }
        for (size_t c = 0; c < N; ++c)
            A.zone_of[c] = (A.zone_of[c] >= 0) ? remap[A.zone_of[c]] : -1;
        A.zones = std::move(kept);
        nz = int(A.zones.size());
    }

    // 5. per-zone data: endpoints, offsets, kind
    for (auto& z : A.zones) {
        size_t c0 = size_t(z.cells.front());
        z.alpha = is_eq(A.end_minus[c0]) ? A.end_minus[c0].ref : -1;
        z.omega = is_eq(A.end_plus[c0]) ? A.end_plus[c0].ref : -1;
    }

    // offsets: BFS tree over zone cells, integrating sqrt(Delta) along edges
    Cx erot = std::polar(1.0, -theta);
    for (auto& z : A.zones) {
        std::vector<Cx> branch(z.cells.size());
        std::map<int, int> pos;
        for (size_t i = 0; i < z.cells.size(); ++i) pos[z.cells[i]] = int(i);
        int start = z.cells.front();
        std::deque<int> q{start};
        std::vector<uint8_t> seen(z.cells.size(), 0);
        seen[pos[start]] = 1;
        branch[pos[start]] = std::sqrt(A.d.Qt.eval(A.cell_center(start)));
        std::vector<Cx> tcum(z.cells.size(), Cx(0, 0));
        while (!q.empty()) {
            int cur = q.front();
            q.pop_front();
            int i = cur % A.n, j = cur / A.n;
            const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
            for (int t = 0; t < 4; ++t) {
                int ni = i + di[t], nj = j + dj[t];
                if (ni < 0 || nj < 0 || ni >= A.n || nj >= A.n) continue;
                int nc = A.idx(ni, nj);
                auto it = pos.find(nc);
                if (it == pos.end() || seen[it->second]) continue;
                if (rays.blocked(A.cell_center(cur), A.cell_center(nc))) continue;
                try {
                    auto [dt, vb] =
                        t_segment(A.d, A.cell_center(cur), A.cell_center(nc), branch[pos[cur]]);
                    tcum[it->second] = tcum[pos[cur]] + dt;
                    branch[it->second] = vb;
                } catch (const error&) {
                    continue; // unreachable through a singular sliver
                }
                seen[it->second] = 1;
                q.push_back(nc);
            }
        }
        double dmin = 0, dmax = 0;
        for (size_t i = 0; i < z.cells.size(); ++i) {
            double off = (erot * tcum[i]).imag();
            A.delta[size_t(z.cells[i])] = off;
            A.tval[size_t(z.cells[i])] = tcum[i];
            A.cellbranch[size_t(z.cells[i])] = branch[i];
            dmin = std::min(dmin, off);
            dmax = std::max(dmax, off);
        }
        z.delta_min = dmin;
        z.delta_max = dmax;
    }

    // kind classification
    for (auto& z : A.zones) {
        size_t c0 = size_t(z.cells.front());
        bool cyc = A.end_plus[c0].kind == EndKind::Cycle;
        if (cyc) {
            // enclosed equilibria decide center vs annular
            TraceOptions o = mesh_opt;
            o.record_points = true;
            Trajectory rep = trace(A.d, theta, A.cell_center(int(c0)), +1, o);
            int enclosed = -1, count = 0;
            for (size_t ci = 0; ci < A.d.crit.size(); ++ci) {
                const auto& c = A.d.crit[ci];
                if (!c.is_equilibrium()) continue;
                double w = 0;
                for (size_t i = 1; i < rep.points.size(); ++i)
                    w += std::arg((rep.points[i] - c.location) / (rep.points[i - 1] - c.location));
                if (std::abs(w) > M_PI) { enclosed = int(ci); ++count; }
            }
            z.kind = (count == 1 && A.d.crit[enclosed].kind == CritKind::Center) ? ZoneKind::Center
                                                                                 : ZoneKind::Annular;
            continue;
        }
        if (z.alpha != z.omega) {
            z.kind = ZoneKind::AlphaOmega;
            continue;
        }
        // alpha == omega: genuine sepal vs folded saddle-sector strip
        const auto& eq = A.d.crit[z.alpha];
        if (eq.kind != CritKind::Parabolic) {
            z.kind = ZoneKind::AlphaOmega;
            continue;
        }
        // origin-free unboundedness test: offset spread of the cells hugging
        // the equilibrium vs the spread away from it
        double r_near = 4 * A.h, r_far = 12 * A.h;
        double nlo = 1e300, nhi = -1e300, flo = 1e300, fhi = -1e300;
        bool any_far = false, any_near = false;
        for (int c : z.cells) {
            double dist = std::abs(A.cell_center(c) - eq.location);
            double od = A.delta[size_t(c)];
            if (dist <= r_near) { nlo = std::min(nlo, od); nhi = std::max(nhi, od); any_near = true; }
            if (dist >= r_far) { flo = std::min(flo, od); fhi = std::max(fhi, od); any_far = true; }
        }
        double rn = any_near ? nhi - nlo : 0, rf = any_far ? fhi - flo : 0;
        z.kind = (!any_far || (any_near && rn > 1.6 * std::max(rf, 1e-12))) ? ZoneKind::Sepal
                                                                            : ZoneKind::AlphaOmega;
    }

    // 6. strip zone structure: bounding saddles, period, theta*, gate
    for (auto& z : A.zones) {
        if (z.kind != ZoneKind::AlphaOmega) continue;
        // cells achieving the offset extremes identify the bounding structures;
        // among near-extreme cells prefer the ones farthest from equilibria so
        // the representatives sit by the bounding hole/boundary rather than
        // deep in the pole funnel
        auto eq_dist = [&](int c) {
            double bd;
            A.d.nearest_equilibrium(A.cell_center(c), &bd);
            return bd;
        };
        double band = 0.1 * std::max(z.delta_max - z.delta_min, 1e-12);
        int cmin = -1, cmax = -1;
        for (int c : z.cells) {
            double off = A.delta[size_t(c)];
            double ed = eq_dist(c);
            if (off <= z.delta_min + band && (cmin < 0 || ed > eq_dist(cmin))) cmin = c;
            if (off >= z.delta_max - band && (cmax < 0 || ed > eq_dist(cmax))) cmax = c;
        }
        auto near_saddle = [&](int cell) {
            double bd;
            const CriticalPoint* s = A.d.nearest_saddle(A.cell_center(cell), &bd);
            if (!s) return -1;
            size_t si = size_t(s - A.d.crit.data());
            return bd < A.d.hole_radius[si] + 3 * A.h ? int(si) : -1;
        };
        z.saddle_a = near_saddle(cmin);
        z.saddle_b = near_saddle(cmax);
        z.t_anchor_lo = A.tval[size_t(cmin)];
        z.t_anchor_hi = A.tval[size_t(cmax)];
        z.anchor_lo_cell = cmin;
        z.anchor_hi_cell = cmax;
        // saddle holes this zone touches: escape-both probes aim at them
        for (size_t si = 0; si < A.d.crit.size(); ++si) {
            if (!A.d.crit[si].is_saddle()) continue;
            double bd = std::numeric_limits<double>::max();
            for (int c : z.cells)
                bd = std::min(bd, std::abs(A.cell_center(c) - A.d.crit[si].location));
            if (bd <= A.d.hole_radius[si] + 3 * A.h) z.touched_saddles.push_back(int(si));
        }

        if (z.saddle_a >= 0 && z.saddle_b >= 0 && z.saddle_a != z.saddle_b) {
            // complex period by quadrature through the zone interior
            Cx mid = A.cell_center(z.cells[z.cells.size() / 2]);
            try {
                // t(a->b) = t(a->mid) - t(b->mid), same sqrt branch at mid
                Cx v_mid = std::sqrt(A.d.Qt.eval(mid));
                Cx t_mid_a = t_from_saddle(A.d, A.d.crit[z.saddle_a], mid, v_mid);
                Cx t_mid_b = t_from_saddle(A.d, A.d.crit[z.saddle_b], mid, v_mid);
                z.period = t_mid_a - t_mid_b;
            } catch (const error&) {
                z.period = Cx(0, 0);
            }
        }
        if (z.period == Cx(0, 0)) {
            // hull estimate: complex t-difference between the extreme cells
            z.period = A.tval[size_t(cmax)] - A.tval[size_t(cmin)];
            if (std::abs(z.period) < 1e-12)
                z.period = Cx(0, std::max(1e-12, z.delta_max - z.delta_min)) *
                           std::polar(1.0, theta);
        }
        double ts = std::arg(z.period);
        while (ts <= -M_PI / 2) ts += M_PI;
        while (ts > M_PI / 2) ts -= M_PI;
        z.theta_star = ts;

        // gate anchor: Newton-refine the mid-offset point from the closest cell
        double mid_off = 0.5 * (z.delta_min + z.delta_max);
        int cbest = z.cells.front();
        for (int c : z.cells)
            if (std::abs(A.delta[size_t(c)] - mid_off) <
                std::abs(A.delta[size_t(cbest)] - mid_off))
                cbest = c;
        Cx q = A.cell_center(cbest);
        Cx vq = std::sqrt(A.d.Qt.eval(q));
        double off = A.delta[size_t(cbest)];
        for (int it = 0; it < 4; ++it) {
            // displacement dq with sqrt(Delta)(q) dq = i e^{i theta} d(off)
            Cx sd = vq / A.d.P.eval(q);
            Cx dq = Cx(0, 1) * std::polar(1.0, theta) * (mid_off - off) / sd;
            Cx qn = q + dq;
            try {
                auto [dt, vb] = t_segment(A.d, q, qn, vq);
                off += (erot * dt).imag();
                q = qn;
                vq = vb;
            } catch (const error&) {
                break;
            }
        }
        z.gate_anchor = q;
        // gate trajectory
        TraceOptions go = mesh_opt;
        go.record_points = true;
        go.branch0 = vq;
        try {
            Trajectory gp = trace(A.d, theta, q, +1, go);
            Trajectory gm = trace(A.d, theta, q, -1, go);
            z.gate_path.assign(gm.points.rbegin(), gm.points.rend());
            z.gate_path.insert(z.gate_path.end(), gp.points.begin(), gp.points.end());
        } catch (const error&) {
        }

        // transversal + midpoint for genuine saddle-saddle strips
        if (z.saddle_a >= 0 && z.saddle_b >= 0 && z.saddle_a != z.saddle_b) {
            try {
                auto dirs = separating_directions(A.d, A.d.crit[z.saddle_a], z.theta_star);
                double best = 1e300;
                Trajectory bestt;
                for (double phi : dirs) {
                    SepSeed s = separatrix_seed(A.d, size_t(z.saddle_a), phi, z.theta_star, false);
                    TraceOptions o = mesh_opt;
                    o.record_points = true;
                    o.use_holes = false;
                    o.branch0 = s.branch;
                    Trajectory tr = trace(A.d, z.theta_star, s.seed, s.dir, o);
                    double miss = tr.approach[z.saddle_b].dist;
                    if (tr.end.kind == EndKind::Saddle && tr.end.ref == z.saddle_b && miss < best) {
                        best = miss;
                        bestt = tr;
                    }
                }
                if (!bestt.points.empty()) {
                    z.transversal = bestt.points;
                    // midpoint: walk cumulative t to half the connection length
                    Cx t0 = t_from_saddle(A.d, A.d.crit[z.saddle_a], bestt.points.front(),
                                          bestt.branch_start);
                    Cx tend = t0 + bestt.t_end;
                    Cx tb = tend + t_from_saddle(A.d, A.d.crit[z.saddle_b], bestt.points.back(),
                                                 bestt.branch_end) *
                                       Cx(-1, 0) * Cx(0, 0); // closing head negligible here
                    Cx half = 0.5 * (t0 + tend);
                    for (size_t i = 0; i + 1 < bestt.points.size(); ++i) {
                        Cx ta = t0 + bestt.tvals[i], tbb = t0 + bestt.tvals[i + 1];
                        double sa = std::abs(ta - half), sb = std::abs(tbb - half);
                        if (sb > sa && i > 0) {
                            z.midpoint = bestt.points[i];
                            z.midpoint_valid = true;
                            break;
                        }
                    }
                    (void)tb;
                }
            } catch (const error&) {
            }
        }
    }

    if (opt.build_fetg) {
        // 7. vertical sweep: the lagoon structure is governed by the vertical
        // foliation (sepal cusps) and the strip transversal angles
        std::vector<double> strip_angles;
        for (auto& z : A.zones)
            if (z.kind == ZoneKind::AlphaOmega) strip_angles.push_back(z.theta_star);
        std::sort(strip_angles.begin(), strip_angles.end());
        strip_angles.erase(std::unique(strip_angles.begin(), strip_angles.end(),
                                       [](double a, double b) { return std::abs(a - b) < 1e-3; }),
                           strip_angles.end());

        std::vector<TraceEnd> vend_plus(N), vend_minus(N);
        std::vector<int8_t> vlab_plus(N, -1), vlab_minus(N, -1);
        parallel_for(N, opt.exec, [&](size_t cidx) {
            if (A.cellstate[cidx] != 1) return;
            Cx x = A.cell_center(int(cidx));
            try {
                Trajectory tp = trace(A.d, M_PI / 2, x, +1, mesh_opt);
                Trajectory tm = trace(A.d, M_PI / 2, x, -1, mesh_opt);
                vend_plus[cidx] = tp.end;
                vend_minus[cidx] = tm.end;
                vlab_plus[cidx] = int8_t(landing_label(A.d, M_PI / 2, tp.end, tp.final_x));
                vlab_minus[cidx] = int8_t(landing_label(A.d, M_PI / 2, tm.end, tm.final_x));
            } catch (const error&) {
                vend_plus[cidx] = {EndKind::Undetermined, -1};
                vend_minus[cidx] = {EndKind::Undetermined, -1};
            }
        });

        parallel_for(N, opt.exec, [&](size_t cidx) {
            if (A.cellstate[cidx] != 1) return;
            Cx x = A.cell_center(int(cidx));
            int z = A.zone_of[cidx];
            auto esc_both_at = [&](double ang) {
                try {
                    Trajectory tp = trace(A.d, ang, x, +1, mesh_opt);
                    if (!is_escape(tp.end)) return false;
                    Trajectory tm = trace(A.d, ang, x, -1, mesh_opt);
                    return is_escape(tm.end);
                } catch (const error&) {
                    return false;
                }
            };
            bool vert_escape = is_escape(vend_plus[cidx]) || is_escape(vend_minus[cidx]);
            bool mark = false;
            if (z >= 0 && A.zones[z].kind == ZoneKind::AlphaOmega) {
                const auto& Z = A.zones[z];
                std::vector<double> angles = {Z.theta_star, Z.theta_star + 0.05,
                                              Z.theta_star - 0.05};
                // aim at the bounding hole centers through t-space, locally per
                // cell (frame-free: the branch sign drops out mod pi); the fat
                // connection has straight but non-parallel margins, so the
                // in-band angle varies from cell to cell
                for (int si : Z.touched_saddles) {
                    const auto& sad = A.d.crit[size_t(si)];
                    try {
                        Cx v = std::sqrt(A.d.Qt.eval(x));
                        Cx disp = t_from_saddle(A.d, sad, x, v);
                        double dist = std::abs(disp);
                        if (dist < 1e-10) continue;
                        double aim = std::arg(disp);
                        auto [cc, nn] = local_model(A.d, sad);
                        double wexp = nn / 2.0 + 1.0;
                        double rht = std::abs(std::sqrt(cc)) *
                                     std::pow(A.d.hole_radius[size_t(si)], wexp) / wexp;
                        double w = std::asin(std::min(0.95, rht / std::max(dist, rht)));
                        for (double f : {0.0, 0.25, -0.25, 0.5, -0.5, 0.75, -0.75, 0.92, -0.92})
                            angles.push_back(aim + f * w);
                    } catch (const error&) {
                    }
                }
                for (double a : angles) {
                    double aa = std::remainder(a, M_PI);
                    if (!mark) mark = esc_both_at(aa);
                }
            }
            else if (z >= 0 && A.zones[z].kind == ZoneKind::Sepal)
                mark = vert_escape;
            else if (z < 0) {
                mark = vert_escape;
                for (double a : strip_angles)
                    if (!mark) mark = esc_both_at(a);
            }
            A.fetg[cidx] = mark ? 1 : 0;
        });

        // morphological closing of the FETG mask: the aimed probes resolve the
        // band up to isolated pinholes, which must not leak the flood fill
        for (int pass = 0; pass < 2; ++pass) {
            auto neigh8 = [&](size_t c, auto&& f) {
                int i = int(c % A.n), j = int(c / A.n);
                for (int dj2 = -1; dj2 <= 1; ++dj2)
                    for (int di2 = -1; di2 <= 1; ++di2) {
                        if (!di2 && !dj2) continue;
                        int ni = i + di2, nj = j + dj2;
                        if (ni < 0 || nj < 0 || ni >= A.n || nj >= A.n) continue;
                        f(size_t(A.idx(ni, nj)));
                    }
            };
            std::vector<uint8_t> dil(N, 0);
            for (size_t c = 0; c < N; ++c) {
                if (A.fetg[c]) { dil[c] = 1; continue; }
                bool any = false;
                neigh8(c, [&](size_t nc) { any = any || A.fetg[nc]; });
                dil[c] = any && A.cellstate[c] == 1;
            }
            for (size_t c = 0; c < N; ++c) {
                if (!dil[c]) { continue; }
                bool all = true;
                neigh8(c, [&](size_t nc) {
                    if (A.cellstate[nc] == 1 && !dil[nc]) all = false;
                });
                A.fetg[c] = all || A.fetg[c];
            }
        }

        // 8. lagoons: components of the complement of the FETG; adjacency
        // additionally requires matching vertical-foliation signatures, which
        // separates vertical sepals across sub-mesh cusp necks
        BlockRays vrays = make_block_rays(A.d, M_PI / 2, cap_r);
        auto vsame = [&](size_t a, size_t b) {
            auto key = [&](size_t c) {
                int al = is_eq(vend_minus[c]) ? vend_minus[c].ref : -9;
                int om = is_eq(vend_plus[c]) ? vend_plus[c].ref : -9;
                return std::tuple<int, int, int, int>(al, om, vlab_minus[c], vlab_plus[c]);
            };
            auto ka = key(a), kb = key(b);
            // escape/cycle cells have no full vertical signature; only block
            // when both sides carry full parabolic landing data and disagree
            bool full_a = std::get<0>(ka) >= 0 && std::get<1>(ka) >= 0 &&
                          (std::get<2>(ka) >= 0 || std::get<3>(ka) >= 0);
            bool full_b = std::get<0>(kb) >= 0 && std::get<1>(kb) >= 0 &&
                          (std::get<2>(kb) >= 0 || std::get<3>(kb) >= 0);
            if (!full_a || !full_b) return true;
            return ka == kb;
        };
        int nl = 0;
        for (size_t s = 0; s < N; ++s) {
            if (A.cellstate[s] != 1 || A.fetg[s] || A.lagoon_of[s] >= 0) continue;
            std::deque<size_t> q{s};
            A.lagoon_of[s] = nl;
            while (!q.empty()) {
                size_t cur = q.front();
                q.pop_front();
                int i = int(cur % A.n), j = int(cur / A.n);
                const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
                for (int t = 0; t < 4; ++t) {
                    int ni = i + di[t], nj = j + dj[t];
                    if (ni < 0 || nj < 0 || ni >= A.n || nj >= A.n) continue;
                    size_t nc = size_t(A.idx(ni, nj));
                    if (A.cellstate[nc] != 1 || A.fetg[nc] || A.lagoon_of[nc] >= 0) continue;
                    if (!vsame(cur, nc)) continue;
                    if (vrays.blocked(A.cell_center(int(cur)), A.cell_center(int(nc)))) continue;
                    A.lagoon_of[nc] = nl;
                    q.push_back(nc);
                }
            }
            ++nl;
        }
        A.lagoons.assign(nl, {});
        for (int l = 0; l < nl; ++l) A.lagoons[l].id = l;
        for (size_t c = 0; c < N; ++c)
            if (A.lagoon_of[c] >= 0) A.lagoons[A.lagoon_of[c]].cells.push_back(int(c));
        // drop speckles
        {
            std::vector<int> remap(nl, -1);
            std::vector<LagoonInfo> kept;
            for (auto& l : A.lagoons)
                if (int(l.cells.size()) >= 5) {
                    remap[l.id] = int(kept.size());
                    LagoonInfo li = l;
                    li.id = int(kept.size());
                    kept.push_back(std::move(li));
                }
            for (size_t c = 0; c < N; ++c)
                A.lagoon_of[c] = (A.lagoon_of[c] >= 0) ? remap[A.lagoon_of[c]] : -1;
            A.lagoons = std::move(kept);
            nl = int(A.lagoons.size());
        }
        // each lagoon is attached to the equilibrium it touches
        for (auto& l : A.lagoons) {
            int best = -1;
            double bd = std::numeric_limits<double>::max();
            for (size_t ci = 0; ci < A.d.crit.size(); ++ci) {
                if (!A.d.crit[ci].is_equilibrium()) continue;
                for (int c : l.cells) {
                    double dist = std::abs(A.cell_center(c) - A.d.crit[ci].location);
                    if (dist < bd) { bd = dist; best = int(ci); }
                }
            }
            l.equilibrium = best;
        }
    }

    // 9. petals: sepals whole, strips split by the gate offset
    for (auto& z : A.zones) {
        auto make_petal = [&](int side) {
            PetalInfo p;
            p.id = int(A.petals.size());
            p.zone = z.id;
            p.side = side;
            double mid_off = 0.5 * (z.delta_min + z.delta_max);
            for (int c : z.cells) {
                if (side == 0 || (side < 0 ? A.delta[size_t(c)] < mid_off
                                           : A.delta[size_t(c)] >= mid_off))
                    p.cells.push_back(c);
            }
            // lagoons met (for strip petals the two t-ends; sepal: the two sides)
            std::map<int, int> lv;
            for (int c : p.cells)
                if (A.lagoon_of[size_t(c)] >= 0) ++lv[A.lagoon_of[size_t(c)]];
            // keep the two most frequent
            int l1 = -1, l2 = -1, v1 = -1, v2 = -1;
            for (auto& [l, v] : lv) {
                if (v > v1) { l2 = l1; v2 = v1; l1 = l; v1 = v; }
                else if (v > v2) { l2 = l; v2 = v; }
            }
            p.lagoon_neg = l1;
            p.lagoon_pos = l2;
            // base points: most interior member cell of each intersection
            auto base_for = [&](int lag, Cx& out) {
                double best = -1;
                for (int c : p.cells) {
                    if (A.lagoon_of[size_t(c)] != lag) continue;
                    int i = c % A.n, j = c / A.n;
                    double score = 1e9;
                    for (int dj2 = -3; dj2 <= 3; ++dj2)
                        for (int di2 = -3; di2 <= 3; ++di2) {
                            int ni = i + di2, nj = j + dj2;
                            double dd = std::sqrt(double(di2 * di2 + dj2 * dj2));
                            if (ni < 0 || nj < 0 || ni >= A.n || nj >= A.n ||
                                A.lagoon_of[size_t(A.idx(ni, nj))] != lag)
                                score = std::min(score, dd);
                        }
                    if (score > best) { best = score; out = A.cell_center(c); }
                }
                return best >= 0;
            };
            if (p.lagoon_neg >= 0) base_for(p.lagoon_neg, p.base_neg);
            if (p.lagoon_pos >= 0) base_for(p.lagoon_pos, p.base_pos);
            // the saddle whose hyperbolic sector this petal carries
            for (size_t ci = 0; ci < A.d.crit.size(); ++ci) {
                if (!A.d.crit[ci].is_saddle()) continue;
                double reach = A.d.hole_radius[ci] + 2.5 * A.h;
                for (int c : p.cells)
                    if (std::abs(A.cell_center(c) - A.d.crit[ci].location) < reach) {
                        p.sector_saddle = int(ci);
                        break;
                    }
                if (p.sector_saddle >= 0) break;
            }
            A.petals.push_back(std::move(p));
        };
        if (z.kind == ZoneKind::Sepal) make_petal(0);
        else if (z.kind == ZoneKind::AlphaOmega) {
            make_petal(-1);
            make_petal(+1);
        }
    }

    return A;
}

// ---------------------------------------------------------------------------

std::vector<SaddleConnection> saddle_connections(const QuadDiff& din, int theta_samples,
                                                 double tol) {
    QuadDiff d = din;
    if (d.crit.empty()) prepare(d);
    std::vector<int> saddles;
    for (size_t i = 0; i < d.crit.size(); ++i)
        if (d.crit[i].is_saddle()) saddles.push_back(int(i));
    std::vector<SaddleConnection> out;
    if (saddles.empty()) return out;

    TraceOptions o;
    o.record_points = false;
    o.use_holes = false;
    o.saddle_capture = 1e-7 * d.radius;

    for (int ai : saddles) {
        int ndir = d.crit[ai].separatrix_count();
        for (int r = 0; r < ndir; ++r) {
            auto sep_at = [&](double th) -> Trajectory {
                auto dirs = separating_directions(d, d.crit[ai], th);
                SepSeed s = separatrix_seed(d, size_t(ai), dirs[r], th, false);
                TraceOptions oo = o;
                oo.branch0 = s.branch;
                return trace(d, th, s.seed, s.dir, oo);
            };
            struct Probe {
                double th;
                std::vector<double> side, dist;
                int endsad;
            };
            auto probe = [&](double th) {
                Trajectory tr = sep_at(th);
                Probe p;
                p.th = th;
                p.endsad = tr.end.kind == EndKind::Saddle ? tr.end.ref : -1;
                for (int bi : saddles) {
                    p.side.push_back(tr.approach[bi].side);
                    p.dist.push_back(tr.approach[bi].dist);
                }
                return p;
            };
            std::vector<Probe> grid;
            for (int g = 0; g < theta_samples; ++g)
                grid.push_back(probe(-M_PI / 2 + M_PI * (g + 0.5) / theta_samples));
            for (int g = 0; g + 1 < int(grid.size()); ++g) {
                for (size_t bi = 0; bi < saddles.size(); ++bi) {
                    if (saddles[bi] == ai) continue;
                    double s1 = grid[g].side[bi], s2 = grid[g + 1].side[bi];
                    double d1 = grid[g].dist[bi], d2 = grid[g + 1].dist[bi];
                    double near = 0.5 * std::abs(d.crit[saddles[bi]].location -
                                                 d.crit[ai].location);
                    if (s1 == 0 || s2 == 0 || (s1 > 0) == (s2 > 0)) continue;
                    if (std::min(d1, d2) > near) continue;
                    double lo = grid[g].th, hi = grid[g + 1].th;
                    double slo = s1;
                    Probe best = d1 < d2 ? grid[g] : grid[g + 1];
                    for (int it = 0; it < 60 && hi - lo > tol; ++it) {
                        double mid = 0.5 * (lo + hi);
                        Probe pm = probe(mid);
                        if (pm.dist[bi] < best.dist[bi]) best = pm;
                        if (pm.side[bi] == 0 || (pm.side[bi] > 0) == (slo > 0))
                            lo = mid;
                        else
                            hi = mid;
                    }
                    if (best.dist[bi] > 1e-4 * d.radius) continue; // bracketed a miss
                    double thstar = 0.5 * (lo + hi);
                    // period by quadrature along the connecting trajectory
                    auto dirs = separating_directions(d, d.crit[ai], thstar);
                    SepSeed s = separatrix_seed(d, size_t(ai), dirs[r], thstar, false);
                    TraceOptions oo = o;
                    oo.record_points = true;
                    oo.branch0 = s.branch;
                    Trajectory tr = trace(d, thstar, s.seed, s.dir, oo);
                    Cx t0 = t_from_saddle(d, d.crit[ai], s.seed, s.branch);
                    Cx tclose = t_from_saddle(d, d.crit[saddles[bi]], tr.points.back(),
                                              tr.branch_end);
                    Cx period = t0 + tr.t_end - tclose;
                    SaddleConnection sc;
                    sc.saddle_a = ai;
                    sc.saddle_b = saddles[bi];
                    sc.direction_index = r;
                    sc.theta = thstar;
                    sc.period = period;
                    sc.square_period = period * period;
                    bool dup = false;
                    for (auto& e : out) {
                        bool same_pair = (e.saddle_a == sc.saddle_a && e.saddle_b == sc.saddle_b) ||
                                         (e.saddle_a == sc.saddle_b && e.saddle_b == sc.saddle_a);
                        double dth = std::remainder(e.theta - sc.theta, M_PI);
                        if (same_pair && std::abs(dth) < 1e-6 &&
                            std::abs(e.square_period - sc.square_period) <
                                1e-5 * (1 + std::abs(e.square_period)))
                            dup = true;
                    }
                    if (!dup) out.push_back(sc);
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// instability indicator for the window scan
bool theta_unstable(const QuadDiff& d, double theta, int fan_seeds) {
    TraceOptions o;
    o.record_points = false;
    o.use_holes = true;
    try {
        auto seps = separatrices(d, theta, o, nullptr);
        for (auto& s : seps)
            if (is_escape(s.end)) return true;
    } catch (const error&) {
        return true;
    }
    double r = 0.9 * d.radius;
    for (int i = 0; i < fan_seeds; ++i) {
        double a = 2 * M_PI * (i + 0.3) / fan_seeds;
        Cx x = r * Cx(std::cos(a), std::sin(a));
        // skip seeds inside holes
        bool bad = false;
        for (size_t ci = 0; ci < d.crit.size(); ++ci)
            if (d.crit[ci].is_saddle() &&
                std::abs(x - d.crit[ci].location) < 1.2 * d.hole_radius[ci])
                bad = true;
        if (bad) continue;
        try {
            Trajectory tp = trace(d, theta, x, +1, o);
            if (!is_escape(tp.end)) continue;
            Trajectory tm = trace(d, theta, x, -1, o);
            if (is_escape(tm.end)) return true;
        } catch (const error&) {
            return true;
        }
    }
    return false;
}

} // namespace

std::vector<StabilityWindow> stability_scan(const QuadDiff& din, int grid, double refine_tol,
                                            Exec exec) {
    QuadDiff d = din;
    if (d.crit.empty()) prepare(d);
    const int fan = 40;

    std::vector<double> th(grid);
    std::vector<uint8_t> bad(grid, 0);
    for (int i = 0; i < grid; ++i) th[i] = -M_PI / 2 + M_PI * (i + 0.5) / grid;
    parallel_for(size_t(grid), exec,
                 [&](size_t i) { bad[i] = theta_unstable(d, th[i], fan) ? 1 : 0; });

    // refine run boundaries by bisection on the indicator
    auto refine = [&](double good, double ugly) {
        for (int it = 0; it < 64 && std::abs(ugly - good) > refine_tol; ++it) {
            double mid = 0.5 * (good + ugly);
            if (theta_unstable(d, mid, fan))
                ugly = mid;
            else
                good = mid;
        }
        return 0.5 * (good + ugly);
    };

    std::vector<StabilityWindow> wins;
    int i = 0;
    while (i < grid) {
        if (bad[i]) { ++i; continue; }
        int j = i;
        while (j + 1 < grid && !bad[j + 1]) ++j;
        double lo = (i == 0) ? -M_PI / 2 : refine(th[i], th[i - 1]);
        double hi = (j == grid - 1) ? M_PI / 2 : refine(th[j], th[j + 1]);
        wins.push_back({lo, hi});
        i = j + 1;
    }

    // isolated connection angles split windows at a point
    auto conns = saddle_connections(d, std::max(91, grid), 1e-11);
    std::vector<double> cuts;
    for (auto& c : conns) cuts.push_back(c.theta);
    std::sort(cuts.begin(), cuts.end());
    std::vector<StabilityWindow> outw;
    for (auto& w : wins) {
        double lo = w.lo;
        for (double c : cuts)
            if (c > lo + refine_tol && c < w.hi - refine_tol) {
                outw.push_back({lo, c});
                lo = c;
            }
        outw.push_back({lo, w.hi});
    }
    return outw;
}

// ---------------------------------------------------------------------------

std::vector<EnlargedPetal> enlarged_petals(const QuadDiff& d, const StabilityWindow& w,
                                           int theta_samples, const AtlasOptions& opt) {
    std::vector<EnlargedPetal> out;
    std::vector<FoliationAtlas> atls;
    double margin = 0.02 * (w.hi - w.lo);
    for (int s = 0; s < theta_samples; ++s) {
        double th = w.lo + margin + (w.hi - w.lo - 2 * margin) * s / double(theta_samples - 1);
        atls.push_back(decompose(d, th, opt));
        if (!atls.back().stable) throw error("enlarged_petals: window sample is unstable");
    }
    const auto& a0 = atls.front();
    for (auto& p0 : a0.petals) {
        EnlargedPetal ep;
        ep.petal_ref = p0.id;
        std::set<int> cells(p0.cells.begin(), p0.cells.end());
        ep.thetas.push_back(a0.theta);
        std::vector<int> prev = p0.cells;
        for (size_t s = 1; s < atls.size(); ++s) {
            // continuity tracking: the petal with maximal cell overlap
            std::set<int> prevset(prev.begin(), prev.end());
            int best = -1;
            size_t bestov = 0;
            for (auto& p : atls[s].petals) {
                size_t ov = 0;
                for (int c : p.cells) ov += prevset.count(c);
                if (ov > bestov) { bestov = ov; best = p.id; }
            }
            if (best < 0) { ep.complete = false; break; }
            prev = atls[s].petals[best].cells;
            cells.insert(prev.begin(), prev.end());
            ep.thetas.push_back(atls[s].theta);
        }
        ep.cells.assign(cells.begin(), cells.end());
        out.push_back(std::move(ep));
    }
    return out;
}

CoreDomains core_and_domains(const QuadDiff& din, int theta_samples, const AtlasOptions& opt) {
    QuadDiff d = din;
    if (d.crit.empty()) prepare(d);
    CoreDomains cd;
    cd.mesh_n = opt.mesh_n;
    cd.radius = d.radius;
    cd.h = 2 * d.radius / opt.mesh_n;
    size_t N = size_t(opt.mesh_n) * opt.mesh_n;
    std::vector<std::set<int>> dom(d.crit.size());

    for (size_t ci = 0; ci < d.crit.size(); ++ci) {
        const auto& c = d.crit[ci];
        if (!c.is_equilibrium()) continue;
        if (c.nu2 == 0) {
            // periodic domain: the center zone of -(|mu|/mu) Delta, i.e. rotate
            // by theta with arg(e^{-2 i theta} mu) = pi
            double th = std::remainder((std::arg(c.mu) - M_PI) / 2, M_PI);
            AtlasOptions o = opt;
            o.build_fetg = false;
            FoliationAtlas a = decompose(d, th, o);
            for (auto& z : a.zones) {
                if (z.kind != ZoneKind::Center) continue;
                double bd;
                const CriticalPoint* e =
                    d.nearest_equilibrium(a.cell_center(z.cells[z.cells.size() / 2]), &bd);
                if (e && size_t(e - d.crit.data()) == ci)
                    for (int cell : z.cells) dom[ci].insert(cell);
            }
        } else {
            // parabolic domain: union of sepal zones over rotations
            for (int s = 0; s < theta_samples; ++s) {
                double th = -M_PI / 2 + M_PI * (s + 0.5) / theta_samples;
                AtlasOptions o = opt;
                o.build_fetg = false;
                FoliationAtlas a;
                try {
                    a = decompose(d, th, o);
                } catch (const error&) {
                    continue;
                }
                if (!a.stable) continue;
                for (auto& z : a.zones)
                    if (z.kind == ZoneKind::Sepal && z.alpha == int(ci))
                        for (int cell : z.cells) dom[ci].insert(cell);
            }
        }
    }
    std::vector<uint8_t> taken(N, 0);
    for (size_t ci = 0; ci < d.crit.size(); ++ci) {
        if (dom[ci].empty()) continue;
        cd.domains.push_back({int(ci), std::vector<int>(dom[ci].begin(), dom[ci].end())});
        for (int c : dom[ci]) taken[size_t(c)] = 1;
    }
    FoliationAtlas probe; // reuse geometry helpers
    probe.n = opt.mesh_n;
    probe.h = cd.h;
    probe.d = d;
    for (size_t c = 0; c < N; ++c) {
        Cx x = probe.cell_center(int(c));
        if (std::abs(x) >= d.radius - 0.5 * cd.h || taken[c]) continue;
        cd.core_cells.push_back(int(c));
    }
    return cd;
}

std::vector<double> measure_separating_directions(const QuadDiff& din, int crit_index,
                                                  double theta, double r0, double tol) {
    QuadDiff d = din;
    if (d.crit.empty()) prepare(d);
    const auto& c = d.crit[crit_index];
    TraceOptions o;
    o.record_points = false;
    o.use_holes = true;
    auto escapes = [&](double phi) {
        Cx x = c.location + r0 * Cx(std::cos(phi), std::sin(phi));
        Trajectory tp = trace(d, theta, x, +1, o);
        Trajectory tm = trace(d, theta, x, -1, o);
        return is_escape(tp.end) || is_escape(tm.end);
    };
    // scan for escape arcs around the circle, return their bisected midlines
    const int n = 720;
    const double step = 2 * M_PI / n;
    std::vector<uint8_t> esc(n);
    for (int i = 0; i < n; ++i) esc[i] = escapes(i * step) ? 1 : 0;
    auto edge = [&](double in_esc, double out_esc) {
        double a = in_esc, b = out_esc;
        for (int it = 0; it < 48 && std::abs(b - a) > tol; ++it) {
            double m = 0.5 * (a + b);
            if (escapes(m))
                a = m;
            else
                b = m;
        }
        return 0.5 * (a + b);
    };
    std::vector<double> dirs;
    for (int i = 0; i < n; ++i) {
        if (!esc[i] || esc[(i + 1) % n]) continue; // escape run ending at sample i
        int len = 1, k = i;
        while (esc[(k - 1 + n) % n] && len < n) {
            k = (k - 1 + n) % n;
            ++len;
        }
        if (len >= n) return {}; // everything escapes: no separating arcs
        // continuous angles (may leave [0, 2pi)); escapes() is periodic
        double a_end = i * step;
        double a_start = a_end - (len - 1) * step;
        double stop = edge(a_end, a_end + step);
        double start = edge(a_start, a_start - step);
        dirs.push_back(std::remainder(0.5 * (start + stop), 2 * M_PI));
    }
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

} // namespace sl2wild
