#include "sl2wild/quaddiff.hpp"

#include <algorithm>
#include <cmath>

namespace sl2wild {

namespace {

// deflate p by (x - a)^m using the known root cluster
PolyC deflate(const PolyC& p, Cx a, int m) {
    PolyC r = p;
    for (int i = 0; i < m; ++i) {
        auto [q, rem] = divrem(r, PolyC({-a, Cx(1, 0)}));
        r = q;
    }
    return r;
}

} // namespace

const CriticalPoint* QuadDiff::nearest_equilibrium(Cx x, double* dist) const {
    const CriticalPoint* best = nullptr;
    double bd = std::numeric_limits<double>::max();
    for (auto& c : crit) {
        if (!c.is_equilibrium()) continue;
        double d = std::abs(x - c.location);
        if (d < bd) { bd = d; best = &c; }
    }
    if (dist) *dist = bd;
    return best;
}

const CriticalPoint* QuadDiff::nearest_saddle(Cx x, double* dist) const {
    const CriticalPoint* best = nullptr;
    double bd = std::numeric_limits<double>::max();
    for (auto& c : crit) {
        if (!c.is_saddle()) continue;
        double d = std::abs(x - c.location);
        if (d < bd) { bd = d; best = &c; }
    }
    if (dist) *dist = bd;
    return best;
}

std::vector<CriticalPoint> critical_points(const QuadDiff& d, const std::vector<Cx>& marked) {
    if (d.Qt.is_zero()) throw error("critical_points: Qtilde is zero");
    if (d.P.is_zero()) throw error("critical_points: P is zero");

    RootSet rp, rq;
    if (d.P.degree() >= 1) rp = poly_roots(d.P, d.root_tol);
    if (d.Qt.degree() >= 1) rq = poly_roots(d.Qt, d.root_tol);
    double scale = d.radius;
    if (rp.residual > 1e-5 || rq.residual > 1e-5)
        throw error("critical_points: root clustering ambiguity; loosen root_tol");

    std::vector<CriticalPoint> out;
    auto find_or_add = [&](Cx loc) -> CriticalPoint& {
        for (auto& c : out)
            if (std::abs(c.location - loc) < 50 * d.root_tol * (1.0 + std::abs(loc))) return c;
        out.push_back({});
        out.back().location = loc;
        return out.back();
    };
    for (auto& r : rp.roots) find_or_add(r.location).p_mult += r.multiplicity;
    for (auto& r : rq.roots) find_or_add(r.location).q_mult += r.multiplicity;
    for (auto& m : marked) {
        CriticalPoint& c = find_or_add(m);
        if (c.p_mult == 0 && c.q_mult == 0) c.nu2 = -2; // marked regular point: rank -1
    }

    for (auto& c : out) {
        c.nu2 = 2 * c.p_mult - c.q_mult - 2;
        if (c.nu2 > 0) {
            c.kind = CritKind::Parabolic;
        } else if (c.nu2 == 0) {
            // mu = Qhat(a) / Phat(a)^2 with the cluster factors removed
            Cx qh = deflate(d.Qt, c.location, c.q_mult).eval(c.location);
            Cx ph = deflate(d.P, c.location, c.p_mult).eval(c.location);
            c.mu = qh / (ph * ph);
            bool neg_real = std::abs(c.mu.imag()) <= 1e-10 * std::abs(c.mu) && c.mu.real() < 0;
            c.kind = neg_real ? CritKind::Center : CritKind::Focus;
        } else {
            c.kind = CritKind::Saddle;
        }
    }
    std::sort(out.begin(), out.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
        return a.location.imag() < b.location.imag();
    });

    // the point at infinity (for globally rational input): order there is
    // dq + 4 - 2 dp as a pole, rank nu2_inf = dq - 2 dp + 2
    CriticalPoint inf;
    inf.at_infinity = true;
    inf.location = Cx(std::numeric_limits<double>::infinity(), 0);
    inf.nu2 = d.Qt.degree() - 2 * d.P.degree() + 2;
    inf.kind = inf.nu2 > 0 ? CritKind::Parabolic : (inf.nu2 == 0 ? CritKind::Focus : CritKind::Saddle);
    out.push_back(inf);
    (void)scale;
    return out;
}

void prepare(QuadDiff& d, const std::vector<Cx>& marked) {
    if (d.crit.empty()) d.crit = critical_points(d, marked);
    d.hole_radius.assign(d.crit.size(), 0.0);
    // minimal pairwise separation among finite critical points
    double sep = 2 * d.radius;
    for (size_t i = 0; i < d.crit.size(); ++i)
        for (size_t j = i + 1; j < d.crit.size(); ++j) {
            if (d.crit[i].at_infinity || d.crit[j].at_infinity) continue;
            sep = std::min(sep, std::abs(d.crit[i].location - d.crit[j].location));
        }
    for (size_t i = 0; i < d.crit.size(); ++i) {
        auto& c = d.crit[i];
        if (!c.is_saddle()) continue;
        // circumscribed radius of the |btilde| >= 1/2 component at the saddle
        double rmax = 0;
        double reach = std::min(0.45 * sep, 0.5 * d.radius);
        for (int a = 0; a < 64; ++a) {
            double ang = 2 * M_PI * a / 64;
            Cx dir(std::cos(ang), std::sin(ang));
            double lo = 0, hi = reach;
            // |btilde| decreases away from the saddle along generic rays
            if (d.btilde_abs(c.location + hi * dir) >= 0.5) { rmax = reach; continue; }
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hi);
                if (d.btilde_abs(c.location + mid * dir) >= 0.5)
                    lo = mid;
                else
                    hi = mid;
            }
            rmax = std::max(rmax, hi);
        }
        d.hole_radius[i] = rmax;
    }
}

std::pair<Cx, int> local_model(const QuadDiff& d, const CriticalPoint& cp) {
    if (cp.at_infinity) throw error("local_model: finite points only");
    Cx qh = deflate(d.Qt, cp.location, cp.q_mult).eval(cp.location);
    Cx ph = deflate(d.P, cp.location, cp.p_mult).eval(cp.location);
    return {qh / (ph * ph), cp.q_mult - 2 * cp.p_mult};
}

std::vector<double> separating_directions(const QuadDiff& d, const CriticalPoint& cp,
                                          double theta) {
    auto [c, n] = local_model(d, cp);
    int count = std::abs(cp.nu2); // 2|nu| directions
    std::vector<double> dirs(count);
    double base = std::arg(c) / 2.0;
    double denom = double(n) / 2.0 + 1.0; // w+1; negative for equilibria (reversed fan)
    for (int r = 0; r < count; ++r) {
        double phi = (theta + r * M_PI - base) / denom;
        phi = std::remainder(phi, 2 * M_PI);
        dirs[r] = phi;
    }
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

MixedDomainReport mixed_domain(const PolyC& P, const PolyC& Qt, double delta_x, int grid_n) {
    QuadDiff d(Qt, P, delta_x);
    MixedDomainReport rep;
    rep.grid_n = grid_n;
    rep.h = 2 * delta_x / (grid_n - 1);
    rep.inside.assign(size_t(grid_n) * grid_n, 0);
    auto at = [&](int i, int j) -> uint8_t& { return rep.inside[size_t(j) * grid_n + i]; };
    for (int j = 0; j < grid_n; ++j)
        for (int i = 0; i < grid_n; ++i) {
            Cx x(-delta_x + i * rep.h, -delta_x + j * rep.h);
            if (std::abs(x) >= delta_x) continue;
            if (d.btilde_abs(x) < 0.5) at(i, j) = 1;
        }
    // flood fill to count components
    std::vector<int> comp(rep.inside.size(), -1);
    int ncomp = 0;
    std::vector<size_t> stack;
    for (size_t s = 0; s < rep.inside.size(); ++s) {
        if (!rep.inside[s] || comp[s] >= 0) continue;
        stack.push_back(s);
        comp[s] = ncomp;
        while (!stack.empty()) {
            size_t cur = stack.back();
            stack.pop_back();
            int i = int(cur % grid_n), j = int(cur / grid_n);
            const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
            for (int t = 0; t < 4; ++t) {
                int ni = i + di[t], nj = j + dj[t];
                if (ni < 0 || nj < 0 || ni >= grid_n || nj >= grid_n) continue;
                size_t ns = size_t(nj) * grid_n + ni;
                if (rep.inside[ns] && comp[ns] < 0) {
                    comp[ns] = ncomp;
                    stack.push_back(ns);
                }
            }
        }
        ++ncomp;
    }
    rep.component_count = ncomp;
    rep.connected = (ncomp == 1);
    rep.singularities_inside = true;
    if (P.degree() >= 1) {
        auto rp = poly_roots(P, 1e-7);
        for (auto& r : rp.roots) {
            Cx a = r.location;
            if (std::abs(a) >= delta_x) { rep.singularities_inside = false; continue; }
            int i = int(std::lround((a.real() + delta_x) / rep.h));
            int j = int(std::lround((a.imag() + delta_x) / rep.h));
            // a singularity is "inside" if some grid neighbor is in the domain
            bool ok = false;
            for (int dj2 = -2; dj2 <= 2 && !ok; ++dj2)
                for (int di2 = -2; di2 <= 2 && !ok; ++di2) {
                    int ni = i + di2, nj = j + dj2;
                    if (ni < 0 || nj < 0 || ni >= grid_n || nj >= grid_n) continue;
                    if (rep.inside[size_t(nj) * grid_n + ni]) ok = true;
                }
            if (!ok) rep.singularities_inside = false;
        }
    }
    return rep;
}

} // namespace sl2wild
