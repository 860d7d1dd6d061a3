#include "sl2wild/formal.hpp"

#include <algorithm>

namespace sl2wild {

PolyC parametric_weak_invariant(const PolyC& P, const PolyC& Q, int m) {
    if (P.degree() < 1) throw error("parametric_weak_invariant: P must be non-constant");
    int k = P.degree() - 1;
    if (m >= 2 * k) throw error("parametric_weak_invariant: m >= 2k is out of scope");
    if (Q.is_zero()) throw error("parametric_weak_invariant: Q is zero");

    // Weierstrass factor of Q: monic collecting the m roots nearest the origin
    PolyC q = PolyC::constant(Cx(1, 0));
    if (m > 0) {
        if (Q.degree() < m) throw error("parametric_weak_invariant: deg Q < m");
        std::vector<Cx> roots = poly_roots_raw(Q);
        std::sort(roots.begin(), roots.end(),
                  [](Cx a, Cx b) { return std::norm(a) < std::norm(b); });
        for (int i = 0; i < m; ++i) q = q * PolyC({-roots[i], Cx(1, 0)});
    }
    auto [E, rem] = divrem(Q, q);
    if (rem.max_abs() > 1e-7 * std::max(1.0, Q.max_abs()))
        throw error("parametric_weak_invariant: Weierstrass factorization failed at this tolerance");
    auto [f, U] = weierstrass_divide(E, P);
    (void)f;
    if (std::abs(U.eval(Cx(0, 0))) < 1e-12 && m > 0)
        throw error("parametric_weak_invariant: unit factor vanishes at 0");
    return q * U;
}

double parametric_remainder_gap(const PolyC& P, const PolyC& Q, const PolyC& Qp) {
    auto [quot, rem] = weierstrass_divide(Q - Qp, P);
    (void)quot;
    double scale = std::max(1.0, std::max(Q.max_abs(), Qp.max_abs()));
    return rem.max_abs() / scale;
}

} // namespace sl2wild
