#pragma once

#include <optional>
#include <string>

#include "sl2wild/companion.hpp"
#include "sl2wild/jets.hpp"
#include "sl2wild/roots.hpp"

namespace sl2wild {

enum class SingKind {
    NonresonantIrregular, // m = 0
    OddMIrregular,        // 0 < m < 2k, m odd  (the paper calls this non-ramified)
    EvenMIrregular,       // 0 < m < 2k, m even (ramified in the paper's labels)
    Fuchsian,             // k = 0, no resonance
    Regular,              // m >= 2k, no resonance
    ResonantRegular,      // m >= 2k and sqrt(4 mu + k^2) integer (possibly 0)
};

inline const char* kind_name(SingKind k) {
    switch (k) {
        case SingKind::NonresonantIrregular: return "nonresonant-irregular";
        case SingKind::OddMIrregular: return "odd-m-irregular";
        case SingKind::EvenMIrregular: return "even-m-irregular";
        case SingKind::Fuchsian: return "fuchsian";
        case SingKind::Regular: return "regular";
        case SingKind::ResonantRegular: return "resonant-regular";
    }
    return "?";
}

template <class T>
struct FormalClass {
    int k = 0;
    int m = 0;            // ord_0 Q; = 2k+1 stands for "m > 2k" when m_beyond is set
    bool m_beyond_2k = false;
    int nu2 = 0;          // Katz rank as a half-integer: nu = nu2 / 2
    SingKind kind = SingKind::Regular;
    T mu = scalar_traits<T>::zero();
    std::optional<int> l;        // resonance integer, 4 mu + k^2 = l^2
    std::optional<T> rho;        // resonant residue, when determined by the jet
    bool rho_determined = false;
    Series<T> jet;               // j^{k+N} Q
    int N = 0, Ntilde = 0;
};

// Square residue of Q (dx/x^{k+1})^2:  (Res_0 sqrt(Q) dx/x^{k+1})^2.
// Zero when m is odd or m > 2k; otherwise determined by j^{k+m/2} Q.
template <class T>
T square_residue(const Series<T>& Q, int k) {
    int m = Q.valuation();
    if (m >= Series<T>::kExact) return scalar_traits<T>::zero(); // Q == 0
    if (m > 2 * k) {
        if (Q.ord < 2 * k && m == Q.ord + 1)
            throw error("square_residue: truncation too short to decide m <= 2k");
        return scalar_traits<T>::zero();
    }
    if (m % 2 == 1) return scalar_traits<T>::zero();
    int need = k + m / 2;
    if (!Q.known_to(need)) throw error("square_residue: need jet of Q to order k+m/2");
    Series<T> E = Q.shift(-m); // unit
    // sqrt(E) = sqrt(E_0) * t with t rational in the coefficients of E
    Series<T> t = sqrt_relative(E, k - m / 2);
    T r = t.coeff(k - m / 2);
    return r * r * E.at0();
}

// Normalized subdominant series of a resonant regular singularity:
// y11 = x^{(l-k)/2} u(x), u(0) = 1, with
//   (x d/dx)^2 u + l x d/dx u + (mu - x^{-2k} Q) u = 0,
// solved by u_n = (sum_{j=1..n} v_j u_{n-j}) / (n (n+l)),  v_j = Q_{2k+j}.
template <class T>
struct SubdominantSeries {
    Jet<T> u;           // coefficients u_0 .. u_order
    std::optional<T> rho;
    bool diagonalizable_known = false;
    bool diagonalizable = false;
};

template <class T>
SubdominantSeries<T> subdominant_series(const CompanionSystem<T>& c, int l, int order) {
    const int k = c.k;
    int m = c.Q.valuation();
    if (m < 2 * k) throw error("subdominant_series: requires m >= 2k (resonant regular)");
    if (!c.Q.known_to(2 * k + order))
        throw error("subdominant_series: Q jet too short for requested order");
    std::vector<T> u(order + 1, scalar_traits<T>::zero());
    u[0] = scalar_traits<T>::one();
    for (int n = 1; n <= order; ++n) {
        T acc = scalar_traits<T>::zero();
        for (int j = 1; j <= n; ++j) acc += c.Q.coeff(2 * k + j) * u[n - j];
        acc = acc / scalar_traits<T>::from_int(long(n) * (n + l));
        u[n] = acc;
    }
    SubdominantSeries<T> out;
    out.u.center = scalar_traits<T>::zero();
    out.u.order = order;
    out.u.coeffs = u;
    if (order >= l) {
        // rho = Res_0 dx/(y11^2 x^{k+1}) = coefficient of x^l in u^{-2}
        Series<T> us(std::vector<T>(u), order);
        Series<T> inv2 = inverse(us * us, l);
        out.rho = inv2.coeff(l);
        out.diagonalizable_known = true;
        out.diagonalizable = scalar_traits<T>::is_zero(*out.rho, 1e-12);
    }
    return out;
}

namespace detail {

// integer l >= 0 with 4 mu + k^2 = l^2, if any
template <class T>
std::optional<int> resonance_integer(const T& mu, int k, int lmax) {
    if constexpr (is_exact_v<T>) {
        if (mu.im != 0) return std::nullopt;
        mpq_class target = 4 * mu.re + k * k;
        if (target < 0 || target.get_den() != 1) return std::nullopt;
        mpz_class s;
        mpz_sqrt(s.get_mpz_t(), target.get_num().get_mpz_t());
        if (s * s != target.get_num() || s > lmax) return std::nullopt;
        return int(s.get_si());
    } else {
        Cx s = std::sqrt(Cx(4.0, 0) * mu + Cx(double(k) * k, 0));
        double tol = 1e-9;
        for (int sign = 0; sign < 2; ++sign) {
            Cx v = sign ? -s : s;
            if (std::abs(v.imag()) > tol) continue;
            long l = std::lround(v.real());
            if (l >= 0 && l <= lmax && std::abs(v.real() - double(l)) < tol) return int(l);
        }
        return std::nullopt;
    }
}

} // namespace detail

template <class T>
FormalClass<T> classify(const CompanionSystem<T>& c) {
    const int k = c.k;
    FormalClass<T> fc;
    fc.k = k;
    int v = c.Q.valuation();
    if (v >= Series<T>::kExact) throw error("classify: Q is identically zero");
    if (v > c.Q.ord && c.Q.ord < 2 * k)
        throw error("classify: truncation too short to determine m");
    if (v > 2 * k) {
        fc.m_beyond_2k = true;
        fc.m = 2 * k + 1; // sentinel, only the category matters
    } else {
        fc.m = v;
    }
    fc.nu2 = std::max(0, 2 * k - fc.m);
    fc.N = (fc.m == 0) ? 0 : (fc.m_beyond_2k ? 2 * k : fc.m - 1);
    fc.Ntilde = fc.m_beyond_2k ? 2 * k : std::min(fc.m, 2 * k);
    if (!c.Q.known_to(k + fc.N)) throw error("classify: Q jet too short for j^{k+N} Q");
    fc.jet = c.Q.jet(k + fc.N);
    fc.mu = square_residue(c.Q, k);

    if (fc.m < 2 * k) {
        if (fc.m == 0)
            fc.kind = SingKind::NonresonantIrregular;
        else
            fc.kind = (fc.m % 2) ? SingKind::OddMIrregular : SingKind::EvenMIrregular;
    } else {
        int lmax = 2 * k + std::min(c.Q.ord, 1 << 16);
        fc.l = detail::resonance_integer(fc.mu, k, lmax);
        if (fc.l)
            fc.kind = SingKind::ResonantRegular;
        else
            fc.kind = (k == 0) ? SingKind::Fuchsian : SingKind::Regular;
        if (fc.l && c.Q.known_to(2 * k + *fc.l)) {
            auto sd = subdominant_series(c, *fc.l, *fc.l);
            fc.rho = sd.rho;
            fc.rho_determined = true;
        }
    }
    return fc;
}

struct EquivalenceDecision {
    bool equivalent = false;
    std::string clause; // which condition decided
};

namespace detail {

template <class T>
bool jets_equal(const Series<T>& a, const Series<T>& b, int n, double tol) {
    for (int i = 0; i <= n; ++i) {
        if constexpr (is_exact_v<T>) {
            if (!(a.coeff(i) == b.coeff(i))) return false;
        } else {
            if (scalar_traits<T>::abs(a.coeff(i) - b.coeff(i)) > tol) return false;
        }
    }
    return true;
}

// the strong-resonance side condition applies exactly when m = 2k and
// 4 mu + k^2 = l^2 with integer l >= max(1, k)
template <class T>
bool strong_resonance(const FormalClass<T>& fc) {
    return !fc.m_beyond_2k && fc.m == 2 * fc.k && fc.l && *fc.l >= std::max(1, fc.k);
}

} // namespace detail

// Formal gauge equivalence per the jet-equality classification; the
// tangent-to-identity flag switches N to Ntilde and the rho condition from
// (rho = 0 <=> rho' = 0) to rho = rho'.
template <class T>
EquivalenceDecision formal_gauge_equivalent(const CompanionSystem<T>& c1,
                                            const CompanionSystem<T>& c2,
                                            bool tangent_to_identity, double tol = 1e-10) {
    if (c1.k != c2.k) throw error("formal_gauge_equivalent: different Poincare rank");
    FormalClass<T> f1 = classify(c1);
    FormalClass<T> f2 = classify(c2);
    if (f1.m_beyond_2k != f2.m_beyond_2k || (!f1.m_beyond_2k && f1.m != f2.m))
        return {false, "vanishing order m differs"};
    int n = c1.k + (tangent_to_identity ? f1.Ntilde : f1.N);
    if (!c1.Q.known_to(n) || !c2.Q.known_to(n))
        throw error("formal_gauge_equivalent: insufficient jets");
    if (!detail::jets_equal(c1.Q, c2.Q, n, tol))
        return {false, tangent_to_identity ? "jet j^{k+Ntilde} differs" : "jet j^{k+N} differs"};
    if (detail::strong_resonance(f1)) {
        if (!f1.rho_determined || !f2.rho_determined)
            throw error("formal_gauge_equivalent: rho undetermined at this truncation");
        bool z1 = scalar_traits<T>::is_zero(*f1.rho, tol);
        bool z2 = scalar_traits<T>::is_zero(*f2.rho, tol);
        if (tangent_to_identity) {
            bool eq;
            if constexpr (is_exact_v<T>)
                eq = (*f1.rho == *f2.rho);
            else
                eq = scalar_traits<T>::abs(*f1.rho - *f2.rho) <= tol;
            if (!eq) return {false, "resonant residue rho differs"};
            return {true, "jet equality and rho = rho'"};
        }
        if (z1 != z2) return {false, "rho vanishing differs"};
        return {true, "jet equality and (rho=0 <=> rho'=0)"};
    }
    return {true, "jet equality"};
}

// Formal normal form: Q_nf = j^{k+Ntilde} Q, plus a * x^{l+2k} in the strong
// resonant case with `a` picked so the tangent-to-identity invariant rho is
// preserved (rho is affine in a).
template <class T>
CompanionSystem<T> normal_form(const CompanionSystem<T>& c) {
    FormalClass<T> fc = classify(c);
    CompanionSystem<T> out;
    out.k = c.k;
    out.Q = c.Q.jet(c.k + fc.Ntilde);
    out.Q.ord = Series<T>::kExact; // the normal form is a polynomial
    if (!detail::strong_resonance(fc)) return out;
    int l = *fc.l;
    if (!fc.rho_determined) throw error("normal_form: rho undetermined at this truncation");
    auto rho_of = [&](const T& a) {
        CompanionSystem<T> probe = out;
        probe.Q = probe.Q + Series<T>::monomial(l + 2 * c.k, a);
        return *subdominant_series(probe, l, l).rho;
    };
    T zero = scalar_traits<T>::zero(), one = scalar_traits<T>::one();
    T r0 = rho_of(zero), r1 = rho_of(one);
    T slope = r1 - r0;
    if (scalar_traits<T>::is_zero(slope, 1e-14)) throw error("normal_form: degenerate rho slope");
    T a = (*fc.rho - r0) / slope;
    if (!scalar_traits<T>::is_zero(a, 1e-13))
        out.Q = out.Q + Series<T>::monomial(l + 2 * c.k, a);
    return out;
}

// Coefficients h_0.. of the commuting formal vector field
// hhat = x^{-m/2} (h_0 + h_1 x + ...) x^{k+1} d/dx, h_0 = 1, solving
// theta^3 hhat - 4 Q theta hhat - 2 hhat theta Q = 0 (m even, m < 2k).
template <class T>
Jet<T> commuting_vector_field(const CompanionSystem<T>& c, int order) {
    const int k = c.k;
    int m = c.Q.valuation();
    if (m >= Series<T>::kExact || m % 2 == 1) throw error("commuting_vector_field: m must be even");
    if (m >= 2 * k) throw error("commuting_vector_field: requires m < 2k");
    if (!c.Q.known_to(m + order)) throw error("commuting_vector_field: Q jet too short");
    const T one = scalar_traits<T>::one();
    auto fi = [](long n) { return scalar_traits<T>::from_int(n); };
    const long a0_num = -m / 2; // a0 = -m/2 (integer: m even)
    std::vector<T> h(order + 1, scalar_traits<T>::zero());
    h[0] = one;
    T qm = c.Q.coeff(m);
    for (long t = 1; t <= order; ++t) {
        T acc = scalar_traits<T>::zero();
        // theta^3 contribution at this order
        long s = t - (2 * k - m);
        if (s >= 0) {
            T f = fi(a0_num + s) * fi(a0_num + s + k) * fi(a0_num + s + 2 * k);
            acc += h[s] * f;
        }
        for (long n = 0; n < t; ++n) {
            long j = m + t - n;
            T qj = c.Q.coeff(int(j));
            if (scalar_traits<T>::is_zero(qj)) continue;
            acc -= (fi(4 * (a0_num + n)) + fi(2 * j)) * qj * h[n];
        }
        h[t] = acc / (fi(4 * t) * qm);
    }
    Jet<T> out;
    out.center = scalar_traits<T>::zero();
    out.order = order;
    out.coeffs = std::move(h);
    (void)one;
    return out;
}

// ---- parametric (unfolded) formal invariants --------------------------------

// The unique polynomial Qtilde of degree <= k+m with Q/Qtilde = 1 mod P:
// factor the m roots of Q nearest the origin into a Weierstrass factor q,
// then Qtilde = q * (Q/q mod P).
PolyC parametric_weak_invariant(const PolyC& P, const PolyC& Q, int m);

// Formal gauge equivalence criterion for unfoldings with k>0, m in {0,1}:
// Q = Q' mod P. Returns the max remainder coefficient magnitude.
double parametric_remainder_gap(const PolyC& P, const PolyC& Q, const PolyC& Qp);

inline bool parametric_formal_equivalent(const PolyC& P, const PolyC& Q, const PolyC& Qp, int m,
                                         double tol = 1e-9) {
    if (m >= 2) throw error("parametric_formal_equivalent: m >= 2, use weak equivalence");
    if (P.degree() < 2) throw error("parametric_formal_equivalent: requires k > 0");
    return parametric_remainder_gap(P, Q, Qp) <= tol;
}

} // namespace sl2wild
