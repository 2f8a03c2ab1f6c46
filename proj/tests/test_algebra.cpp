#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "tautring/linalg.hpp"
#include "tautring/mpoly.hpp"

using namespace tautring;

namespace {

MPoly rand_poly(std::mt19937& rng, const std::vector<std::string>& vars, int maxdeg, int nterms) {
    std::uniform_int_distribution<int> ed(0, maxdeg);
    std::uniform_int_distribution<int> cd(-5, 5);
    MPoly p(vars);
    for (int t = 0; t < nterms; ++t) {
        MPoly::Expo e(vars.size());
        for (auto& x : e) x = ed(rng);
        p.add_term(e, Rat(cd(rng)));
    }
    return p;
}

}  // namespace

TEST_CASE("rational basics") {
    REQUIRE(Rat(6, 4).str() == "3/2");
    REQUIRE(Rat(-6, 4).str() == "-3/2");
    REQUIRE(Rat(4, -8).str() == "-1/2");
    REQUIRE(Rat("948096/691").den() == 691);
    REQUIRE((Rat(1, 3) + Rat(1, 6)) == Rat(1, 2));
    REQUIRE(Rat(2, 3).pow(3) == Rat(8, 27));
    REQUIRE_THROWS_AS(Rat(1) / Rat(0), Error);
}

TEST_CASE("graded pieces") {
    MPoly z = MPoly::var("z");
    MPoly p = (MPoly::one() + z).pow(3);
    REQUIRE(p.graded_piece(2) == Rat(3) * z * z);
    REQUIRE(MPoly::one().graded_piece(1).is_zero());

    // graded_piece((1+l)(1+z1+z3), 2) == l*z1 + l*z3, by direct expansion.
    MPoly l = MPoly::var("l"), z1 = MPoly::var("z1"), z3 = MPoly::var("z3");
    MPoly q = (MPoly::one() + l) * (MPoly::one() + z1 + z3);
    REQUIRE(q.graded_piece(2) == l * z1 + l * z3);
}

TEST_CASE("weighted grading") {
    MPoly l1 = MPoly::var("l1", 1), l2 = MPoly::var("l2", 2);
    MPoly p = l1 * l1 - Rat(2) * l2;
    REQUIRE(p.is_homogeneous());
    REQUIRE(p.degree() == 2);
    REQUIRE(p.graded_piece(2) == p);
}

TEST_CASE("series inverse") {
    MPoly z = MPoly::var("z");
    MPoly inv = (MPoly::one() + z).series_inverse(3);
    REQUIRE(inv == MPoly::one() - z + z * z - z * z * z);

    MPoly z1 = MPoly::var("z1"), z2 = MPoly::var("z2");
    REQUIRE(((MPoly::one() + z1) * (MPoly::one() + z2)).series_inverse(1) ==
            MPoly::one() - z1 - z2);

    MPoly z3 = MPoly::var("z3");
    MPoly p = MPoly::one() + z1 + z3;
    MPoly q = p.series_inverse(2);
    REQUIRE(q == MPoly::one() - z1 - z3 + z1 * z1 + Rat(2) * z1 * z3 + z3 * z3);
    // multiply-back check
    REQUIRE((p * q).truncate_leq(2) == MPoly::one());

    REQUIRE_THROWS_AS((Rat(2) * MPoly::one() + z).series_inverse(2), Error);
}

TEST_CASE("series inverse multiply-back property") {
    std::mt19937 rng(7);
    for (int it = 0; it < 20; ++it) {
        MPoly p = MPoly::one() + rand_poly(rng, {"x", "y"}, 2, 4) * MPoly::var("x");
        int d = 4;
        MPoly q = p.series_inverse(d);
        REQUIRE((p * q).truncate_leq(d) == MPoly::one());
    }
}

TEST_CASE("ring axioms on random polynomials") {
    std::mt19937 rng(3);
    for (int it = 0; it < 15; ++it) {
        MPoly p = rand_poly(rng, {"x", "y", "z"}, 3, 5);
        MPoly q = rand_poly(rng, {"x", "y"}, 3, 4);
        MPoly r = rand_poly(rng, {"y", "z"}, 2, 4);
        REQUIRE((p + q) * r == p * r + q * r);
        REQUIRE(p * q == q * p);
        REQUIRE((p * q) * r == p * (q * r));
    }
}

TEST_CASE("elementary symmetric rewrite") {
    MPoly l1 = MPoly::var("l1"), l2 = MPoly::var("l2");
    auto rewrite2 = [&](const MPoly& p) {
        return elementary_symmetric_rewrite(p, {"l1", "l2"}, {"e1", "e2"});
    };
    MPoly e1 = MPoly::var("e1", 1), e2 = MPoly::var("e2", 2);
    REQUIRE(rewrite2(l1 + l2) == e1);
    REQUIRE(rewrite2(l1 * l1 + l2 * l2) == e1 * e1 - Rat(2) * e2);
    REQUIRE(rewrite2(l1 * l2 + l1 + l2) == e2 + e1);
    REQUIRE_THROWS_AS(rewrite2(l1 * l1 + l2), Error);
}

TEST_CASE("elementary symmetric rewrite round-trips") {
    std::mt19937 rng(11);
    std::vector<std::string> roots = {"a", "b", "c"};
    for (int it = 0; it < 10; ++it) {
        // Symmetrize a random polynomial over the 3 roots.
        MPoly raw = rand_poly(rng, roots, 3, 5);
        MPoly sym = raw;
        sym += raw.rename({{"a", "b"}, {"b", "a"}});
        sym += raw.rename({{"b", "c"}, {"c", "b"}});
        sym += raw.rename({{"a", "c"}, {"c", "a"}});
        sym += raw.rename({{"a", "b"}, {"b", "c"}, {"c", "a"}});
        sym += raw.rename({{"a", "c"}, {"c", "b"}, {"b", "a"}});
        MPoly ep = elementary_symmetric_rewrite(sym, roots, {"e1", "e2", "e3"});
        // Substitute e_i back by their expansions.
        std::map<std::string, MPoly> back = {
            {"e1", detail::elementary_symmetric_poly(roots, 1)},
            {"e2", detail::elementary_symmetric_poly(roots, 2)},
            {"e3", detail::elementary_symmetric_poly(roots, 3)},
        };
        REQUIRE(ep.substitute(back) == sym);
    }
}

TEST_CASE("substitution and division helpers") {
    MPoly x = MPoly::var("x"), y = MPoly::var("y");
    MPoly p = x * x * y + Rat(2) * x * y;
    REQUIRE(p.divide_by_monomial({{"x", 1}, {"y", 1}}) == x + Rat(2) * MPoly::one());
    REQUIRE_THROWS_AS(p.divide_by_monomial({{"x", 2}}), Error);
    REQUIRE(p.substitute({{"x", y}}) == y * y * y + Rat(2) * y * y);
    REQUIRE(p.coefficient_of("x", 1) == Rat(2) * y);
    REQUIRE(p.coefficient({{"x", 2}, {"y", 1}}) == Rat(1));
}

TEST_CASE("canonical rendering") {
    MPoly x = MPoly::var("x"), y = MPoly::var("y");
    MPoly p = Rat(-3) * x * x + x * y + Rat(1, 2) * y - MPoly::one();
    REQUIRE(p.str() == "-3*x^2 + x*y + 1/2*y - 1");
    REQUIRE(MPoly::zero().str() == "0");
}

TEST_CASE("solve_linear") {
    QMatrix I(3, 3);
    for (int i = 0; i < 3; ++i) I.at(i, i) = Rat(1);
    auto s = solve_linear(I, {Rat(4), Rat(-1), Rat(1, 3)});
    REQUIRE(s.kind == LinearSolution::Unique);
    REQUIRE(s.x == std::vector<Rat>{Rat(4), Rat(-1), Rat(1, 3)});

    QMatrix A(1, 1);
    A.at(0, 0) = Rat(2);
    auto s2 = solve_linear(A, {Rat(1)});
    REQUIRE(s2.kind == LinearSolution::Unique);
    REQUIRE(s2.x[0] == Rat(1, 2));

    // Inconsistent system.
    QMatrix B(2, 1);
    B.at(0, 0) = Rat(1);
    B.at(1, 0) = Rat(1);
    REQUIRE(solve_linear(B, {Rat(0), Rat(1)}).kind == LinearSolution::NoSolution);

    // Underdetermined system.
    QMatrix C(1, 2);
    C.at(0, 0) = Rat(1);
    C.at(0, 1) = Rat(1);
    auto s3 = solve_linear(C, {Rat(5)});
    REQUIRE(s3.kind == LinearSolution::Affine);
    REQUIRE(s3.free_dims == 1);
    REQUIRE(s3.x[0] + s3.x[1] == Rat(5));
}

TEST_CASE("echelon basis and modp echelon agree on rank") {
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> cd(-4, 4);
    for (int it = 0; it < 10; ++it) {
        std::vector<SparseRow> rows;
        QMatrix dense(6, 5);
        for (int i = 0; i < 6; ++i) {
            SparseRow r;
            for (int j = 0; j < 5; ++j) {
                int v = cd(rng);
                if (v) {
                    r.emplace_back(j, Rat(v));
                    dense.at(i, j) = Rat(v);
                }
            }
            rows.push_back(r);
        }
        EchelonBasis eb;
        ModpEchelon mp(2305843009213693951ULL);  // 2^61 - 1
        for (auto& r : rows) {
            eb.insert(r);
            ModpEchelon::Row mr;
            for (auto& [c, v] : r) {
                long n = static_cast<long>(v.num().get_si());
                std::uint64_t u = n >= 0 ? n : mp.p() - static_cast<std::uint64_t>(-n);
                if (u % mp.p()) mr.emplace_back(c, u % mp.p());
            }
            mp.insert(std::move(mr));
        }
        REQUIRE(eb.rank() == dense.rank());
        REQUIRE(mp.rank() <= eb.rank());
    }
}
