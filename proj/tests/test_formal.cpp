#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sl2wild/formal.hpp"

using namespace sl2wild;

namespace {

// random SL2-valued polynomial gauge germ with det == 1 exactly
template <class T>
Mat2S<T> random_sl2_germ(int deg, bool tangent_to_identity = false) {
    auto rnd = [&]() {
        if constexpr (is_exact_v<T>)
            return oracle::random_ratc(3, 3);
        else
            return oracle::random_cx(1.0);
    };
    auto rnd_series = [&](bool unit) {
        std::vector<T> c(deg + 1);
        for (auto& v : c) v = rnd();
        if (unit) c[0] = scalar_traits<T>::one();
        return Series<T>(std::move(c), Series<T>::kExact);
    };
    Series<T> b = rnd_series(false), c = rnd_series(false), u = rnd_series(true);
    if (tangent_to_identity) {
        if (!b.c.empty()) b.c[0] = scalar_traits<T>::zero();
        if (!c.c.empty()) c.c[0] = scalar_traits<T>::zero();
        b.clamp();
        c.clamp();
    }
    Mat2S<T> U = Mat2S<T>::identity(), L = Mat2S<T>::identity(), D;
    U.a12 = b;
    L.a21 = c;
    D.a11 = u;
    D.a22 = inverse(u, 24);
    D.a12 = Series<T>::zero();
    D.a21 = Series<T>::zero();
    return U * (L * D);
}

template <class T>
CompanionSystem<T> make_companion(int k, std::vector<T> qc) {
    CompanionSystem<T> c;
    c.k = k;
    c.Q = Series<T>(std::move(qc), Series<T>::kExact);
    return c;
}

} // namespace

TEST_CASE("to_companion: already-companion input is fixed") {
    auto c = make_companion<RatC>(1, {RatC(1), RatC(2)});
    TracelessSystem<RatC> s{1, c.matrix()};
    auto [comp, g] = to_companion(s, 8);
    CHECK(comp.Q.coeff(0) == RatC(1));
    CHECK(comp.Q.coeff(1) == RatC(2));
    CHECK(comp.Q.coeff(2) == RatC(0));
    CHECK(companion_residual(s, comp, g, 8) == 0.0);
}

TEST_CASE("to_companion: scaled off-diagonal, Q from the reduction formula") {
    // A = [[0,2],[2q,0]]: constant a12 kills the log-derivative terms, so the
    // reduction formula gives Q = -det A = 4q (and T acts as a diag scaling)
    auto q = Series<RatC>({RatC(3), RatC(1)}, Series<RatC>::kExact);
    TracelessSystem<RatC> s;
    s.k = 2;
    s.A.a11 = Series<RatC>::zero();
    s.A.a12 = Series<RatC>::constant(RatC(2));
    s.A.a21 = RatC(2) * q;
    s.A.a22 = Series<RatC>::zero();
    auto [comp, g] = to_companion(s, 8);
    CHECK(companion_residual(s, comp, g, 8) == 0.0);
    CHECK(comp.Q.coeff(0) == RatC(12));
    CHECK(comp.Q.coeff(1) == RatC(4));
}

TEST_CASE("to_companion: A=[[x,1],[1,-x]], k=1 evaluates eq:Q term by term") {
    TracelessSystem<RatC> s;
    s.k = 1;
    s.A.a11 = Series<RatC>::x();
    s.A.a12 = Series<RatC>::constant(RatC(1));
    s.A.a21 = Series<RatC>::constant(RatC(1));
    s.A.a22 = -Series<RatC>::x();
    auto [comp, g] = to_companion(s, 10);
    // term-by-term: -det A = 1+x^2, theta(a11) = x^2, log-deriv terms vanish
    CHECK(comp.Q.coeff(0) == RatC(1));
    CHECK(comp.Q.coeff(1) == RatC(0));
    CHECK(comp.Q.coeff(2) == RatC(2));
    CHECK(companion_residual(s, comp, g, 10) == 0.0);
}

TEST_CASE("to_companion: constant conjugation engages when a12(0)=0") {
    // diagonal leading matrix
    TracelessSystem<Cx> s;
    s.k = 1;
    s.A.a11 = Series<Cx>::constant(Cx(1, 0));
    s.A.a12 = Series<Cx>::x();
    s.A.a21 = Series<Cx>::zero();
    s.A.a22 = Series<Cx>::constant(Cx(-1, 0));
    auto [comp, g] = to_companion(s, 8);
    CHECK(companion_residual(s, comp, g, 8) < 1e-10);
}

TEST_CASE("to_companion: random traceless systems satisfy the conjugation identity") {
    for (int trial = 0; trial < 25; ++trial) {
        int k = 1 + trial % 3;
        TracelessSystem<Cx> s;
        s.k = k;
        auto rnd_series = [&](int deg) {
            std::vector<Cx> c(deg + 1);
            for (auto& v : c) v = oracle::random_cx();
            return Series<Cx>(std::move(c), Series<Cx>::kExact);
        };
        s.A.a11 = rnd_series(4);
        s.A.a12 = rnd_series(4);
        if (std::abs(s.A.a12.at0()) < 0.1) s.A.a12.c[0] = Cx(1.0, 0.3);
        s.A.a21 = rnd_series(4);
        s.A.a22 = -s.A.a11;
        auto [comp, g] = to_companion(s, 10);
        CHECK(companion_residual(s, comp, g, 10) < 1e-10);
    }
}

TEST_CASE("classify: basic taxonomy") {
    SUBCASE("k=1, Q=1: nonresonant irregular, nu=1, mu=0") {
        auto fc = classify(make_companion<RatC>(1, {RatC(1)}));
        CHECK(fc.m == 0);
        CHECK(fc.nu2 == 2);
        CHECK(fc.kind == SingKind::NonresonantIrregular);
        // square residue of (dx/x^2)^2-type differential is 0 (Res_0 x^{-2}sqrt(1+..))
        CHECK(fc.mu == RatC(0));
    }
    SUBCASE("k=2, Q=x: m=1, nu=3/2, mu=0") {
        auto fc = classify(make_companion<RatC>(2, {RatC(0), RatC(1)}));
        CHECK(fc.m == 1);
        CHECK(fc.nu2 == 3);
        CHECK(fc.mu == RatC(0));
        CHECK(fc.kind == SingKind::OddMIrregular);
    }
    SUBCASE("k=1, Q=2x^2: resonant regular with l=3") {
        auto fc = classify(make_companion<RatC>(1, {RatC(0), RatC(0), RatC(2)}));
        CHECK(fc.m == 2);
        CHECK(fc.mu == RatC(2));
        REQUIRE(fc.l.has_value());
        CHECK(*fc.l == 3);
        CHECK(fc.kind == SingKind::ResonantRegular);
    }
    SUBCASE("insufficient jet is reported") {
        CompanionSystem<RatC> c;
        c.k = 2;
        c.Q = Series<RatC>({}, 1); // zero to order 1, m undecidable
        CHECK_THROWS_AS(classify(c), error);
    }
}

TEST_CASE("square_residue") {
    SUBCASE("pure power mu x^{2k}") {
        for (int k = 1; k <= 3; ++k) {
            Series<RatC> q = Series<RatC>::monomial(2 * k, RatC::make(7, 3));
            CHECK(square_residue(q, k) == RatC::make(7, 3));
        }
    }
    SUBCASE("normal form x^m (1 + 2 sqrt(mu) x^{k-m/2})") {
        // [PAPER] Strebel normal form list; exact when sqrt(mu) is rational
        struct Case { int k, m; RatC sqmu; };
        for (auto cs : {Case{2, 0, RatC::make(1, 2)}, Case{3, 2, RatC::make(-2, 5)},
                        Case{2, 2, RatC::make(3, 1)}}) {
            Series<RatC> q = Series<RatC>::monomial(cs.m, RatC(1)) +
                             Series<RatC>::monomial(cs.k + cs.m / 2, RatC(2) * cs.sqmu);
            CHECK(square_residue(q, cs.k) == cs.sqmu * cs.sqmu);
        }
    }
    SUBCASE("odd m gives zero") {
        Series<RatC> q = Series<RatC>::monomial(1, RatC(5)) + Series<RatC>::monomial(2, RatC(3));
        CHECK(square_residue(q, 2) == RatC(0));
    }
    SUBCASE("floating: 20 random cases to 1e-12") {
        for (int trial = 0; trial < 20; ++trial) {
            int k = 1 + trial % 3;
            int m = 2 * (trial % k); // even, < 2k: the x^m(1+2 sqrt(mu) x^{k-m/2}) shape
            Cx sq = oracle::random_unit_cx() * (0.5 + 0.1 * (trial % 5));
            Series<Cx> q = Series<Cx>::monomial(m, Cx(1, 0)) +
                           Series<Cx>::monomial(k + m / 2, 2.0 * sq);
            CHECK(std::abs(square_residue(q, k) - sq * sq) < 1e-12);
            // m = 2k: the Strebel form is mu x^{2k} directly
            Series<Cx> q2 = Series<Cx>::monomial(2 * k, sq * sq);
            CHECK(std::abs(square_residue(q2, k) - sq * sq) < 1e-14);
        }
    }
}

TEST_CASE("subdominant series and resonant residue rho") {
    SUBCASE("pure power: u = 1, rho = 0 for l != 0") {
        auto c = make_companion<RatC>(2, {RatC(0), RatC(0), RatC(0), RatC(0), RatC(3)}); // 3x^4
        auto fc = classify(c);
        REQUIRE(fc.l.has_value()); // 4*3+4 = 16 = 4^2
        CHECK(*fc.l == 4);
        auto sd = subdominant_series(c, *fc.l, 8);
        for (int i = 1; i <= 8; ++i) CHECK(sd.u.coeffs[i] == RatC(0));
        REQUIRE(sd.rho.has_value());
        CHECK(*sd.rho == RatC(0));
        CHECK(sd.diagonalizable);
    }
    SUBCASE("k=0, l=2, Q=1+x: recursion vs hand value and Frobenius oracle") {
        auto c = make_companion<RatC>(0, {RatC(1), RatC(1)});
        auto sd = subdominant_series(c, 2, 6);
        CHECK(sd.u.coeffs[1] == RatC::make(1, 3));
        CHECK(sd.u.coeffs[2] == RatC::make(1, 24));
        REQUIRE(sd.rho.has_value());
        CHECK(*sd.rho == RatC::make(1, 4));
        CHECK(*sd.rho == oracle::frobenius_rho(c.Q, 0, 2));
        CHECK_FALSE(sd.diagonalizable);
    }
    SUBCASE("constructed resonant-regular cases match the Frobenius oracle exactly") {
        for (int trial = 0; trial < 10; ++trial) {
            int k = trial % 3;
            int l = std::max(1, k) + trial % 3;
            // mu = (l^2 - k^2)/4
            RatC mu = RatC::make(long(l) * l - long(k) * k, 4);
            std::vector<RatC> qc(2 * k + 1 + 4, RatC(0));
            qc[2 * k] = mu;
            for (int j = 1; j <= 4; ++j) qc[2 * k + j] = oracle::random_ratc(4, 3);
            if (mu == RatC(0)) { // m > 2k resonant case needs Q nonzero beyond
                qc[2 * k] = RatC(0);
            }
            auto c = make_companion<RatC>(k, qc);
            auto sd = subdominant_series(c, l, l + 2);
            REQUIRE(sd.rho.has_value());
            CHECK(*sd.rho == oracle::frobenius_rho(c.Q, k, l));
        }
    }
    SUBCASE("order below l leaves rho undetermined") {
        auto c = make_companion<RatC>(0, {RatC(1), RatC(1)});
        auto sd = subdominant_series(c, 2, 1);
        CHECK_FALSE(sd.rho.has_value());
    }
}

TEST_CASE("formal gauge equivalence") {
    SUBCASE("reflexive") {
        auto c = make_companion<RatC>(2, {RatC(1), RatC(2), RatC(3)});
        CHECK(formal_gauge_equivalent(c, c, false).equivalent);
        CHECK(formal_gauge_equivalent(c, c, true).equivalent);
    }
    SUBCASE("k=2, m=0: N=0, only j^2 matters") {
        auto c1 = make_companion<RatC>(2, {RatC(1)});
        auto c2 = make_companion<RatC>(2, {RatC(1), RatC(0), RatC(0), RatC(1)}); // 1 + x^3
        CHECK(formal_gauge_equivalent(c1, c2, false).equivalent);
    }
    SUBCASE("k=1, m=1: gauge equivalent but not tangent-to-identity") {
        auto c1 = make_companion<RatC>(1, {RatC(0), RatC(1)});
        auto c2 = make_companion<RatC>(1, {RatC(0), RatC(1), RatC(1)}); // x + x^2
        CHECK(formal_gauge_equivalent(c1, c2, false).equivalent); // j^1 equal
        CHECK_FALSE(formal_gauge_equivalent(c1, c2, true).equivalent); // j^2 differs
    }
    SUBCASE("resonant case compares rho") {
        // k=0, Q = 1 + x vs 1 + x + a x^3: same j^{k+N}=j^0, rho differs or not
        auto c1 = make_companion<RatC>(0, {RatC(1), RatC(1)});
        auto c2 = make_companion<RatC>(0, {RatC(1), RatC(1), RatC(0), RatC(1)});
        auto d = formal_gauge_equivalent(c1, c2, false);
        // both have some rho; equivalence iff (rho=0 <=> rho'=0); values:
        auto r1 = subdominant_series(c1, 2, 2).rho;
        auto r2 = subdominant_series(c2, 2, 2).rho;
        REQUIRE(r1.has_value());
        REQUIRE(r2.has_value());
        CHECK(d.equivalent == ((*r1 == RatC(0)) == (*r2 == RatC(0))));
    }
}

TEST_CASE("normal form") {
    SUBCASE("k=1, Q=1+x^4 -> 1") {
        auto nf = normal_form(make_companion<RatC>(1, {RatC(1), RatC(0), RatC(0), RatC(0), RatC(1)}));
        CHECK(nf.Q.coeff(0) == RatC(1));
        CHECK(nf.Q.to_poly().degree() == 0);
    }
    SUBCASE("k=2, Q=x+x^5 -> x") {
        auto nf = normal_form(make_companion<RatC>(2, {RatC(0), RatC(1), RatC(0), RatC(0), RatC(0), RatC(1)}));
        CHECK(nf.Q.coeff(1) == RatC(1));
        CHECK(nf.Q.to_poly().degree() == 1);
    }
    SUBCASE("idempotence, including a resonant case") {
        auto c = make_companion<RatC>(1, {RatC(0), RatC(0), RatC(2), RatC(1), RatC(1), RatC(1), RatC(1)});
        auto nf = normal_form(c);
        auto nf2 = normal_form(nf);
        CHECK(nf.Q.c.size() == nf2.Q.c.size());
        for (size_t i = 0; i < nf.Q.c.size(); ++i) CHECK(nf.Q.c[i] == nf2.Q.c[i]);
        // and the normal form is tangent-to-identity equivalent to the input
        CHECK(formal_gauge_equivalent(c, nf, true).equivalent);
    }
}

TEST_CASE("point transformations") {
    SUBCASE("identity is neutral") {
        auto c = make_companion<RatC>(2, {RatC(1), RatC(2), RatC(3)});
        PointTransform<RatC> id{Series<RatC>::x()};
        auto c2 = point_transform_apply(id, c, 8);
        for (int i = 0; i <= 8; ++i) CHECK(c2.Q.coeff(i) == c.Q.coeff(i));
    }
    SUBCASE("phi = cx preserves the square residue of mu x^{2k}") {
        auto c = make_companion<RatC>(2, {RatC(0), RatC(0), RatC(0), RatC(0), RatC::make(5, 2)});
        PointTransform<RatC> sc{Series<RatC>::monomial(1, RatC::make(3, 2))};
        auto c2 = point_transform_apply(sc, c, 10);
        CHECK(square_residue(c2.Q, 2) == RatC::make(5, 2) * RatC::make(5, 2) / RatC::make(5, 2));
        CHECK(square_residue(c2.Q, 2) == square_residue(c.Q, 2));
    }
    SUBCASE("composition law apply(phi1, apply(phi2, c)) == apply(phi1 o phi2, c)") {
        for (int trial = 0; trial < 6; ++trial) {
            int k = 1 + trial % 2;
            std::vector<RatC> qc(2 * k + 2);
            for (auto& v : qc) v = oracle::random_ratc(3, 2);
            auto c = make_companion<RatC>(k, qc);
            auto rnd_phi = [&]() {
                std::vector<RatC> pc(5, RatC(0));
                pc[1] = RatC(1) + oracle::random_ratc(1, 3);
                if (pc[1] == RatC(0)) pc[1] = RatC(1);
                for (int i = 2; i < 5; ++i) pc[i] = oracle::random_ratc(2, 3);
                return Series<RatC>(std::move(pc), Series<RatC>::kExact);
            };
            Series<RatC> p1 = rnd_phi(), p2 = rnd_phi();
            int w = 6;
            auto lhs = point_transform_apply({p1}, point_transform_apply({p2}, c, w + 6), w);
            auto rhs = point_transform_apply({compose(p1, p2)}, c, w);
            for (int i = 0; i <= w; ++i) CHECK(lhs.Q.coeff(i) == rhs.Q.coeff(i));
        }
    }
    SUBCASE("Schwarzian consistency: Q = -1/2 S_theta(f) transforms per the rule") {
        // pick f with theta f a unit-ish series so S_theta(f) is regular enough;
        // use k=1, f = x + x^2 (floating): theta f = x^2(1+2x)
        int k = 1, w = 6;
        Series<Cx> f({Cx(0, 0), Cx(1, 0), Cx(1, 0)}, Series<Cx>::kExact);
        Series<Cx> Q = Cx(-0.5, 0) * schwarzian_theta(f, k, w + 6);
        CompanionSystem<Cx> c{k, Q, std::nullopt};
        Series<Cx> phi({Cx(0, 0), Cx(1, 0), Cx(0.3, 0.1)}, Series<Cx>::kExact);
        auto c2 = point_transform_apply(PointTransform<Cx>{phi}, c, w);
        // S transforms contravariantly: Q' = -1/2 S_theta(f o phi^{-1})
        Series<Cx> finv = compose(f, reversion(phi, w + 8));
        Series<Cx> Q2 = Cx(-0.5, 0) * schwarzian_theta(finv, k, w);
        for (int i = 0; i <= w; ++i) CHECK(std::abs(c2.Q.coeff(i) - Q2.coeff(i)) < 1e-9);
    }
    SUBCASE("mu invariance under random point transforms, m even <= 2k") {
        for (int trial = 0; trial < 8; ++trial) {
            int k = 2, m = 2 * (trial % 3);
            std::vector<RatC> qc(k + m / 2 + 3, RatC(0));
            qc[m] = RatC(1) + oracle::random_ratc(2, 3) * oracle::random_ratc(2, 3);
            if (qc[m] == RatC(0)) qc[m] = RatC(1);
            for (int i = m + 1; i < int(qc.size()); ++i) qc[i] = oracle::random_ratc(3, 2);
            auto c = make_companion<RatC>(k, qc);
            std::vector<RatC> pc(4, RatC(0));
            pc[1] = RatC(1);
            pc[2] = oracle::random_ratc(2, 3);
            pc[3] = oracle::random_ratc(2, 3);
            PointTransform<RatC> pt{Series<RatC>(std::move(pc), Series<RatC>::kExact)};
            auto c2 = point_transform_apply(pt, c, k + m / 2 + 2);
            CHECK(square_residue(c2.Q, k) == square_residue(c.Q, k));
        }
    }
}

TEST_CASE("gauge invariance of the formal class") {
    // classify(conjugate(c, T)) agrees with classify(c) for random SL2 germs T
    for (int trial = 0; trial < 10; ++trial) {
        int k = 1 + trial % 3;
        std::vector<RatC> qc(2 * k + 2, RatC(0));
        int m = trial % (2 * k); // irregular
        qc[m] = RatC(1) + oracle::random_ratc(1, 2) * oracle::random_ratc(1, 2);
        if (qc[m] == RatC(0)) qc[m] = RatC(2);
        for (int i = m + 1; i < int(qc.size()); ++i) qc[i] = oracle::random_ratc(3, 3);
        auto c = make_companion<RatC>(k, qc);
        auto T = random_sl2_germ<RatC>(3);
        TracelessSystem<RatC> s{k, c.matrix()};
        auto s2 = gauge_conjugate(s, T, k + 2 * k + 8);
        auto [c2, g] = to_companion(s2, k + 2 * k + 4);
        auto f1 = classify(c);
        auto f2 = classify(c2);
        CHECK(f1.m == f2.m);
        CHECK(f1.nu2 == f2.nu2);
        CHECK(f1.kind == f2.kind);
        CHECK(f1.mu == f2.mu);
        CHECK(formal_gauge_equivalent(c, c2, false).equivalent);
    }
}

TEST_CASE("commuting vector field") {
    SUBCASE("m=0, Q=1, k=1: hhat = 1") {
        auto c = make_companion<RatC>(1, {RatC(1)});
        auto h = commuting_vector_field(c, 6);
        CHECK(h.coeffs[0] == RatC(1));
        for (int i = 1; i <= 6; ++i) CHECK(h.coeffs[i] == RatC(0));
    }
    SUBCASE("monomial Q: first correction at t = 2k-m matches the closed form") {
        int k = 3, m = 2;
        RatC ccoef = RatC::make(5, 3);
        auto c = make_companion<RatC>(k, {RatC(0), RatC(0), ccoef});
        auto h = commuting_vector_field(c, 2 * k - m + 1);
        // h_{2k-m} = (-m/2)(k-m/2)(2k-m/2) / (4(2k-m) c)
        RatC expect = RatC(-m / 2) * RatC(k - m / 2) * RatC(2 * k - m / 2) /
                      (RatC(4 * (2 * k - m)) * ccoef);
        CHECK(h.coeffs[2 * k - m] == expect);
        for (int i = 1; i < 2 * k - m; ++i) CHECK(h.coeffs[i] == RatC(0));
    }
    SUBCASE("defining ODE residual vanishes to the computed order (exact)") {
        // residual check in shifted coordinates: multiply everything by x^{m/2}
        for (int trial = 0; trial < 5; ++trial) {
            int k = 2 + trial % 2, m = 2 * (trial % 2);
            int order = 6;
            std::vector<RatC> qc(m + order + 1, RatC(0));
            qc[m] = RatC(1) + oracle::random_ratc(1, 2) * oracle::random_ratc(1, 2);
            if (qc[m] == RatC(0)) qc[m] = RatC(3);
            for (int i = m + 1; i < int(qc.size()); ++i) qc[i] = oracle::random_ratc(2, 2);
            auto c = make_companion<RatC>(k, qc);
            auto h = commuting_vector_field(c, order);
            // Work with exponents shifted by +m/2 so everything is a power series:
            // represent hhat = x^{-m/2} g. theta(x^{a-m/2} ) = (a-m/2) x^{a-m/2+k}.
            // residual(x) * x^{m/2} should vanish through x^{k + m + order} ...
            // assemble the three terms with explicit index arithmetic
            int L = m + order + 3 * k + 2;
            std::vector<RatC> t3(L, RatC(0)), qth(L, RatC(0)), hq(L, RatC(0));
            auto g_at = [&](int n) { return (n >= 0 && n <= order) ? h.coeffs[n] : RatC(0); };
            for (int n = 0; n <= order; ++n) {
                long a = n - m / 2;
                RatC f = RatC(a) * RatC(a + k) * RatC(a + 2 * k);
                if (n + 3 * k < L) t3[n + 3 * k] += g_at(n) * f;
            }
            for (int n = 0; n <= order; ++n)
                for (int j = m; j < int(qc.size()); ++j) {
                    long a = n - m / 2;
                    if (n + j + k < L) {
                        qth[n + j + k] += RatC(4) * qc[j] * RatC(a) * g_at(n);
                        hq[n + j + k] += RatC(2) * RatC(j) * qc[j] * g_at(n);
                    }
                }
            // theta^3 h - 4 Q theta h - 2 h theta Q has x^{n} coefficients
            // (shifted by m/2) vanishing for n <= m + k + order
            for (int n = 0; n <= m + k + order; ++n) {
                RatC r = t3[n] - qth[n] - hq[n];
                CHECK(r == RatC(0));
            }
        }
    }
    SUBCASE("odd m is rejected") {
        auto c = make_companion<RatC>(2, {RatC(0), RatC(1)});
        CHECK_THROWS_AS(commuting_vector_field(c, 4), error);
    }
}

TEST_CASE("parametric weak invariant") {
    SUBCASE("polynomial of degree <= k+m is a fixed point") {
        PolyC P({Cx(-0.2, 0), Cx(0, 0), Cx(1, 0)}); // x^2 - 0.2, k=1
        PolyC Q({Cx(1, 0), Cx(0.5, 0)});            // degree 1 <= k+m, m=0
        PolyC qt = parametric_weak_invariant(P, Q, 0);
        CHECK((qt - Q).max_abs() < 1e-12);
    }
    SUBCASE("Q = Qtilde (1 + P) recovers Qtilde") {
        PolyC P({Cx(0.3, 0), Cx(0, 0), Cx(0, 0), Cx(1, 0)}); // k=2
        PolyC qt_true({Cx(2, 0), Cx(-1, 0), Cx(0.4, 0)});
        PolyC one = PolyC::constant(Cx(1, 0));
        PolyC Q = qt_true * (one + P);
        PolyC qt = parametric_weak_invariant(P, Q, 0);
        CHECK((qt - qt_true).max_abs() < 1e-10);
    }
    SUBCASE("division property: Q - Qtilde divisible by P") {
        PolyC P({Cx(-0.37, 0.11), Cx(0, 0), Cx(1, 0)}); // x^2 - eps
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<Cx> qc(6);
            for (auto& v : qc) v = oracle::random_cx();
            qc[1] += Cx(2, 0); // keep a robust m=1 root pattern near 0? m=0 here
            qc[0] += Cx(3, 0);
            PolyC Q(qc);
            PolyC qt = parametric_weak_invariant(P, Q, 0);
            auto [quot, rem] = weierstrass_divide(Q - qt, P);
            CHECK(rem.max_abs() < 1e-9 * std::max(1.0, Q.max_abs()));
        }
    }
}

TEST_CASE("parametric formal equivalence (m = 0,1)") {
    PolyC P({Cx(-0.3, 0), Cx(0, 0), Cx(1, 0)});
    PolyC Q({Cx(1, 0), Cx(2, 0), Cx(0.5, 0)});
    SUBCASE("Q' = Q + P is equivalent") {
        CHECK(parametric_formal_equivalent(P, Q, Q + P, 0));
    }
    SUBCASE("Q' = Q + x is not") {
        CHECK_FALSE(parametric_formal_equivalent(P, Q, Q + PolyC::x(), 0));
    }
    SUBCASE("Q' = Q + P * random at 5 eps samples") {
        for (int s = 0; s < 5; ++s) {
            Cx eps = Cx(0.05 + 0.03 * s, 0.02 * s);
            PolyC Ps({-eps, Cx(0, 0), Cx(1, 0)});
            std::vector<Cx> rc(3);
            for (auto& v : rc) v = oracle::random_cx();
            PolyC R(rc);
            CHECK(parametric_formal_equivalent(Ps, Q, Q + Ps * R, 0));
        }
    }
    SUBCASE("m >= 2 refers to weak equivalence") {
        CHECK_THROWS_AS(parametric_formal_equivalent(P, Q, Q, 2), error);
    }
}
