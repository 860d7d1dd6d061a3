#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sl2wild/jets.hpp"
#include "sl2wild/roots.hpp"
#include "sl2wild/sqrt_path.hpp"

using namespace sl2wild;

namespace {

PolyC expand_from_factors(std::initializer_list<std::pair<Cx, int>> factors) {
    PolyC p = PolyC::constant(Cx(1, 0));
    for (auto& [r, m] : factors)
        for (int i = 0; i < m; ++i) p = p * PolyC({-r, Cx(1, 0)});
    return p;
}

} // namespace

TEST_CASE("poly basics: eval, derivative, taylor shift") {
    PolyC p({Cx(1, 0), Cx(0, 0), Cx(0, 0), Cx(1, 0)}); // 1 + x^3
    CHECK(std::abs(p.eval(Cx(2, 0)) - Cx(9, 0)) < 1e-14);
    PolyC sh = p.taylor_at(Cx(1, 0)); // (x+1)^3 + 1 = x^3+3x^2+3x+2
    CHECK(std::abs(sh.coeff(0) - Cx(2, 0)) < 1e-14);
    CHECK(std::abs(sh.coeff(1) - Cx(3, 0)) < 1e-14);
    CHECK(std::abs(sh.coeff(2) - Cx(3, 0)) < 1e-14);
    CHECK(std::abs(sh.coeff(3) - Cx(1, 0)) < 1e-14);
}

TEST_CASE("poly_roots: symmetric and monomial factorizations") {
    auto rs = poly_roots(PolyC({Cx(-1, 0), Cx(0, 0), Cx(1, 0)})); // x^2 - 1
    REQUIRE(rs.roots.size() == 2);
    CHECK(std::abs(rs.roots[0].location - Cx(-1, 0)) < 1e-12);
    CHECK(std::abs(rs.roots[1].location - Cx(1, 0)) < 1e-12);
    CHECK(rs.roots[0].multiplicity == 1);

    auto rs3 = poly_roots(PolyC({Cx(0, 0), Cx(0, 0), Cx(0, 0), Cx(1, 0)})); // x^3
    REQUIRE(rs3.roots.size() == 1);
    CHECK(rs3.roots[0].multiplicity == 3);
    CHECK(std::abs(rs3.roots[0].location) < 1e-12);
}

TEST_CASE("poly_roots: clustered multiplicities vs companion-matrix oracle") {
    // (x - 0.1)^2 (x + 0.1)^5, frozen expectation cross-checked by the
    // eigenvalue oracle below
    PolyC p = expand_from_factors({{Cx(0.1, 0), 2}, {Cx(-0.1, 0), 5}});
    auto rs = poly_roots(p, 1e-8);
    REQUIRE(rs.roots.size() == 2);
    CHECK(rs.roots[0].multiplicity == 5);
    CHECK(std::abs(rs.roots[0].location - Cx(-0.1, 0)) < 1e-6);
    CHECK(rs.roots[1].multiplicity == 2);
    CHECK(std::abs(rs.roots[1].location - Cx(0.1, 0)) < 1e-6);

    auto raw = oracle::companion_eigen_roots(p);
    int near_plus = 0, near_minus = 0;
    for (auto r : raw) {
        if (std::abs(r - Cx(0.1, 0)) < 1e-2) ++near_plus;
        if (std::abs(r - Cx(-0.1, 0)) < 1e-2) ++near_minus;
    }
    CHECK(near_plus == 2);
    CHECK(near_minus == 5);
}

TEST_CASE("poly_roots property: reconstruct o roots is identity for separated roots") {
    std::uniform_real_distribution<double> deg(2.0, 8.99);
    for (int trial = 0; trial < 40; ++trial) {
        int n = int(deg(oracle::rng()));
        // well separated roots on a grid jittered
        std::vector<Cx> roots;
        for (int i = 0; i < n; ++i)
            roots.push_back(Cx(double(i % 3) * 2.0 - 2.0, double(i / 3) * 2.0 - 2.0) +
                            0.3 * oracle::random_cx());
        PolyC p = PolyC::constant(Cx(1, 0));
        for (auto r : roots) p = p * PolyC({-r, Cx(1, 0)});
        auto rs = poly_roots(p, 1e-9);
        REQUIRE(rs.total_multiplicity() == n);
        PolyC rec = from_roots(rs, p.c.back());
        CHECK((rec - p).max_abs() / p.max_abs() < 1e-9);
    }
}

TEST_CASE("weierstrass division") {
    SUBCASE("one-step division x^3+1 by x^2") {
        auto [q, r] = weierstrass_divide(PolyC({Cx(1, 0), Cx(0, 0), Cx(0, 0), Cx(1, 0)}),
                                         PolyC({Cx(0, 0), Cx(0, 0), Cx(1, 0)}));
        CHECK(q.degree() == 1);
        CHECK(std::abs(q.coeff(1) - Cx(1, 0)) < 1e-15);
        CHECK(std::abs(q.coeff(0)) < 1e-15);
        CHECK(r.degree() == 0);
        CHECK(std::abs(r.coeff(0) - Cx(1, 0)) < 1e-15);
    }
    SUBCASE("degree below divisor") {
        auto [q, r] = weierstrass_divide(PolyC::x(), PolyC({Cx(0, 0), Cx(0, 0), Cx(1, 0)}));
        CHECK(q.is_zero());
        CHECK(r.degree() == 1);
    }
    SUBCASE("reconstruction oracle at eps=0.3") {
        // q = (x^2-eps)(3x+2) + (x-5)
        PolyC p({Cx(-0.3, 0), Cx(0, 0), Cx(1, 0)});
        PolyC expect_quot({Cx(2, 0), Cx(3, 0)});
        PolyC expect_rem({Cx(-5, 0), Cx(1, 0)});
        PolyC q = p * expect_quot + expect_rem; // multiplication oracle
        auto [quot, rem] = weierstrass_divide(q, p);
        CHECK((quot - expect_quot).max_abs() < 1e-13);
        CHECK((rem - expect_rem).max_abs() < 1e-13);
    }
    SUBCASE("non-monic divisor rejected") {
        CHECK_THROWS_AS(weierstrass_divide(PolyC::x(), PolyC({Cx(0, 0), Cx(2, 0)})), error);
    }
    SUBCASE("exact round trip in rational mode") {
        for (int trial = 0; trial < 20; ++trial) {
            std::uniform_int_distribution<int> d(-9, 9);
            auto rnd = [&] { return RatC::make(d(oracle::rng()), 1 + std::abs(d(oracle::rng())),
                                               d(oracle::rng()), 1 + std::abs(d(oracle::rng()))); };
            std::vector<RatC> qc(7), pc(3);
            for (auto& v : qc) v = rnd();
            for (auto& v : pc) v = rnd();
            pc.back() = RatC(1); // monic
            PolyQ q(qc), p(pc);
            auto [quot, rem] = weierstrass_divide(q, p);
            PolyQ back = p * quot + rem;
            CHECK(back.c.size() == q.c.size());
            bool same = true;
            for (size_t i = 0; i < q.c.size(); ++i) same = same && (back.c[i] == q.c[i]);
            CHECK(same);
            CHECK(rem.degree() < p.degree());
        }
    }
}

TEST_CASE("jets") {
    PolyC x3 = PolyC::monomial(3, Cx(1, 0));
    auto j0 = jet_of(x3, Cx(0, 0), 2);
    CHECK(std::abs(j0.coeff(0)) + std::abs(j0.coeff(1)) + std::abs(j0.coeff(2)) < 1e-15);
    auto j1 = jet_of(x3, Cx(1, 0), 1);
    CHECK(std::abs(j1.coeff(0) - Cx(1, 0)) < 1e-14);
    CHECK(std::abs(j1.coeff(1) - Cx(3, 0)) < 1e-14);
    // evaluator case: 1/(1-x) at 0 -> all ones
    auto jg = jet_of([](Cx x) { return Cx(1, 0) / (Cx(1, 0) - x); }, Cx(0, 0), 3);
    for (int i = 0; i <= 3; ++i) CHECK(std::abs(jg.coeff(i) - Cx(1, 0)) < 1e-10);
}

TEST_CASE("sqrt_continue") {
    SUBCASE("no ramification: f=x^2 from 1 to 2") {
        RationalFn f{PolyC({Cx(0, 0), Cx(0, 0), Cx(1, 0)})};
        std::vector<Cx> path{Cx(1, 0), Cx(1.5, 0), Cx(2, 0)};
        auto vals = sqrt_continue(f, path, Cx(1, 0));
        CHECK(std::abs(vals.back() - Cx(2, 0)) < 1e-12);
    }
    SUBCASE("monodromy of sqrt(x) around 0") {
        RationalFn f{PolyC::x()};
        std::vector<Cx> loop;
        for (int i = 0; i <= 16; ++i) {
            double a = 2 * M_PI * i / 16;
            loop.push_back(Cx(std::cos(a), std::sin(a)));
        }
        auto vals = sqrt_continue(f, loop, Cx(1, 0));
        CHECK(std::abs(vals.back() + Cx(1, 0)) < 1e-12);
    }
    SUBCASE("parity equals winding number of f (oracle)") {
        // f = x^3 + 0.1, loop of radius 2 encloses all three roots
        PolyC fpoly({Cx(0.1, 0), Cx(0, 0), Cx(0, 0), Cx(1, 0)});
        RationalFn f{fpoly};
        std::vector<Cx> loop, fvals;
        for (int i = 0; i <= 64; ++i) {
            double a = 2 * M_PI * i / 64;
            Cx z = 2.0 * Cx(std::cos(a), std::sin(a));
            loop.push_back(z);
            fvals.push_back(f.eval(z));
        }
        long w = oracle::winding_number(fvals);
        CHECK(w == 3);
        auto vals = sqrt_continue(f, loop, std::sqrt(f.eval(loop[0])));
        Cx expected = (w % 2 == 0) ? vals.front() : -vals.front();
        CHECK(std::abs(vals.back() - expected) < 1e-10);
    }
    SUBCASE("property: random loops flip sign by parity of enclosed odd-order roots") {
        for (int trial = 0; trial < 12; ++trial) {
            // random polynomial with roots inside |z| < 1
            int n = 1 + trial % 4;
            PolyC p = PolyC::constant(Cx(1, 0));
            for (int i = 0; i < n; ++i) p = p * PolyC({-0.8 * oracle::random_cx(), Cx(1, 0)});
            RationalFn f{p};
            std::vector<Cx> loop, fvals;
            double R = 2.5;
            for (int i = 0; i <= 200; ++i) {
                double a = 2 * M_PI * i / 200;
                Cx z = R * Cx(std::cos(a), std::sin(a));
                loop.push_back(z);
                fvals.push_back(f.eval(z));
            }
            long w = oracle::winding_number(fvals);
            auto vals = sqrt_continue(f, loop, std::sqrt(f.eval(loop[0])));
            Cx expected = (w % 2 == 0) ? vals.front() : -vals.front();
            CHECK(std::abs(vals.back() - expected) < 1e-8);
        }
    }
    SUBCASE("branch ambiguity near a zero is reported") {
        RationalFn f{PolyC::x()};
        std::vector<Cx> path{Cx(1, 0), Cx(-1, 1e-14)}; // passes essentially through 0
        CHECK_THROWS_AS(sqrt_continue(f, path, Cx(1, 0)), error);
    }
}

TEST_CASE("discriminant") {
    SUBCASE("x^2 - eps -> 4 eps") {
        PolyC p({Cx(-0.7, 0), Cx(0, 0), Cx(1, 0)});
        CHECK(std::abs(discriminant(p) - Cx(4 * 0.7, 0)) < 1e-12);
    }
    SUBCASE("x^2 + bx + c -> b^2 - 4c") {
        Cx b(1.3, -0.4), c(0.2, 0.9);
        PolyC p({c, b, Cx(1, 0)});
        CHECK(std::abs(discriminant(p) - (b * b - 4.0 * c)) < 1e-12);
    }
    SUBCASE("depressed cubic vs root-product oracle") {
        Cx pp(0.7, 0.2), qq(-0.3, 0.5);
        PolyC p({qq, pp, Cx(0, 0), Cx(1, 0)});
        Cx d = discriminant(p);
        Cx closed = -4.0 * pp * pp * pp - 27.0 * qq * qq;
        CHECK(std::abs(d - closed) < 1e-10);
        CHECK(std::abs(d - oracle::root_product_discriminant(p)) < 1e-9);
    }
    SUBCASE("exact rational discriminant of x^3 + px + q") {
        PolyQ p({RatC::make(2, 3), RatC::make(-1, 2), RatC(0), RatC(1)});
        // -4 p^3 - 27 q^2 with p=-1/2, q=2/3 -> -4(-1/8) - 27(4/9) = 1/2 - 12
        RatC d = discriminant(p);
        CHECK(d == RatC::make(-23, 2));
    }
}
