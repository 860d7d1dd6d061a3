#include "sl2wild/roots.hpp"

#include <cmath>
#include <limits>

namespace sl2wild {

namespace {

// One Aberth-Ehrlich sweep; returns max correction magnitude.
double aberth_sweep(const PolyC& p, const PolyC& dp, std::vector<Cx>& z) {
    const size_t n = z.size();
    double worst = 0;
    for (size_t i = 0; i < n; ++i) {
        Cx pv = p.eval(z[i]);
        Cx dv = dp.eval(z[i]);
        if (pv == Cx(0, 0)) continue;
        Cx newton = (dv == Cx(0, 0)) ? Cx(1e-3, 1e-3) : pv / dv;
        Cx sum(0, 0);
        for (size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            Cx d = z[i] - z[j];
            if (std::norm(d) < 1e-60) d = Cx(1e-30, 0);
            sum += Cx(1, 0) / d;
        }
        Cx denom = Cx(1, 0) - newton * sum;
        Cx w = (std::norm(denom) < 1e-60) ? newton : newton / denom;
        z[i] -= w;
        worst = std::max(worst, std::abs(w));
    }
    return worst;
}

struct Cluster {
    Cx center;
    int mult;
};

PolyC reconstruct(const std::vector<Cluster>& cl, Cx leading) {
    PolyC r = PolyC::constant(leading);
    for (auto& c : cl) {
        PolyC lin({-c.center, Cx(1, 0)});
        for (int i = 0; i < c.mult; ++i) r = r * lin;
    }
    return r;
}

double rel_coeff_error(const PolyC& a, const PolyC& b) {
    PolyC d = a - b;
    double scale = std::max(1e-300, std::max(a.max_abs(), b.max_abs()));
    return d.max_abs() / scale;
}

// Polish a multiplicity-m cluster center: a root of multiplicity m of p is a
// simple root of p^(m-1); run a few guarded Newton steps there.
Cx polish(const PolyC& p, Cx z0, int m) {
    PolyC d = p;
    for (int i = 1; i < m; ++i) d = d.derivative();
    PolyC dd = d.derivative();
    Cx z = z0;
    for (int it = 0; it < 12; ++it) {
        Cx dv = dd.eval(z);
        if (std::abs(dv) < 1e-300) break;
        Cx step = d.eval(z) / dv;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
        if (std::abs(step) > 0.5 * (1.0 + std::abs(z0))) break; // runaway, keep centroid
        z -= step;
        if (std::abs(step) < 1e-16 * (1.0 + std::abs(z))) break;
    }
    if (std::abs(z - z0) > 0.5 * (1.0 + std::abs(z0))) return z0;
    return z;
}

} // namespace

std::vector<Cx> poly_roots_raw(const PolyC& p) {
    if (p.is_zero()) throw error("poly_roots: zero polynomial");
    PolyC q = p;
    // exact zero roots split off directly
    int val = q.valuation();
    std::vector<Cx> out(val, Cx(0, 0));
    if (val > 0) {
        std::vector<Cx> c(q.c.begin() + val, q.c.end());
        q = PolyC(std::move(c));
    }
    int n = q.degree();
    if (n <= 0) return out;
    // normalize to monic
    Cx lc = q.c.back();
    for (auto& v : q.c) v /= lc;
    PolyC dq = q.derivative();

    // initial guesses on the Cauchy-bound circle
    double r = 0;
    for (int i = 0; i < n; ++i) r = std::max(r, std::abs(q.c[i]));
    r = 1.0 + r;
    std::vector<Cx> z(n);
    for (int i = 0; i < n; ++i) {
        double ang = 2 * M_PI * i / n + 0.379;
        z[i] = r * Cx(std::cos(ang), std::sin(ang));
    }
    double prev = std::numeric_limits<double>::max();
    for (int it = 0; it < 600; ++it) {
        double w = aberth_sweep(q, dq, z);
        if (w < 1e-14 * (1.0 + r)) break;
        // stalled at a multiple-root cluster radius
        if (it > 60 && w > 0.5 * prev && w < 1e-5 * (1.0 + r)) break;
        prev = w;
    }
    out.insert(out.end(), z.begin(), z.end());
    return out;
}

RootSet poly_roots(const PolyC& p, double tol) {
    std::vector<Cx> raw = poly_roots_raw(p);
    Cx lc = p.c.back();

    std::vector<Cluster> cl(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) cl[i] = {raw[i], 1};

    // mandatory pre-merge: roots within tol*(1+|root|) are one multiple root
    for (bool merged = true; merged;) {
        merged = false;
        for (size_t i = 0; i < cl.size() && !merged; ++i)
            for (size_t j = i + 1; j < cl.size() && !merged; ++j) {
                double scale = 1.0 + std::abs(cl[i].center);
                if (std::abs(cl[i].center - cl[j].center) <= tol * scale) {
                    cl[i].center = (cl[i].center * double(cl[i].mult) +
                                    cl[j].center * double(cl[j].mult)) /
                                   double(cl[i].mult + cl[j].mult);
                    cl[i].mult += cl[j].mult;
                    cl.erase(cl.begin() + j);
                    merged = true;
                }
            }
    }

    auto eval_config = [&](std::vector<Cluster>& cfg) {
        for (auto& c : cfg)
            if (c.mult > 1) c.center = polish(p, c.center, c.mult);
        return rel_coeff_error(reconstruct(cfg, lc), p);
    };

    std::vector<Cluster> best = cl;
    double best_err = eval_config(best);
    // greedy merge of closest pair; keep the configuration with the smallest
    // reconstruction error, stop early once under tol
    while (cl.size() > 1 && best_err >= tol) {
        size_t bi = 0, bj = 1;
        double bd = std::numeric_limits<double>::max();
        for (size_t i = 0; i < cl.size(); ++i)
            for (size_t j = i + 1; j < cl.size(); ++j) {
                double d = std::abs(cl[i].center - cl[j].center);
                if (d < bd) { bd = d; bi = i; bj = j; }
            }
        Cluster merged;
        merged.mult = cl[bi].mult + cl[bj].mult;
        merged.center = (cl[bi].center * double(cl[bi].mult) + cl[bj].center * double(cl[bj].mult)) /
                        double(merged.mult);
        cl[bi] = merged;
        cl.erase(cl.begin() + bj);
        double err = eval_config(cl);
        if (err < best_err) { best_err = err; best = cl; }
    }

    RootSet rs;
    rs.residual = best_err;
    for (auto& c : best) rs.roots.push_back({c.center, c.mult});
    std::sort(rs.roots.begin(), rs.roots.end(), [](const Root& a, const Root& b) {
        if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
        return a.location.imag() < b.location.imag();
    });
    return rs;
}

PolyC from_roots(const RootSet& rs, Cx leading) {
    PolyC r = PolyC::constant(leading);
    for (auto& root : rs.roots) {
        PolyC lin({-root.location, Cx(1, 0)});
        for (int i = 0; i < root.multiplicity; ++i) r = r * lin;
    }
    return r;
}

} // namespace sl2wild
