#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>

#include "tautring/trees.hpp"

using namespace tautring;

namespace {

ColoredTree make_tree(std::vector<int> genus, std::vector<int> color,
                      std::vector<std::array<int, 2>> edges) {
    ColoredTree t;
    t.genus = std::move(genus);
    t.color = std::move(color);
    t.edges = std::move(edges);
    return t;
}

// Brute-force |Aut| oracle: count vertex permutations preserving genus,
// color, and adjacency.
long long brute_aut(const ColoredTree& t) {
    int n = t.n();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::set<std::pair<int, int>> E;
    for (auto& e : t.edges) {
        E.insert({std::min(e[0], e[1]), std::max(e[0], e[1])});
    }
    long long cnt = 0;
    do {
        bool ok = true;
        for (int v = 0; v < n && ok; ++v)
            ok = t.genus[perm[v]] == t.genus[v] && t.color[perm[v]] == t.color[v];
        for (auto& e : t.edges) {
            if (!ok) break;
            int a = perm[e[0]], b = perm[e[1]];
            ok = E.count({std::min(a, b), std::max(a, b)}) > 0;
        }
        if (ok) ++cnt;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return cnt;
}

ColoredTree relabel(const ColoredTree& t, const std::vector<int>& perm) {
    ColoredTree r;
    r.genus.assign(t.n(), 0);
    r.color.assign(t.n(), 0);
    for (int v = 0; v < t.n(); ++v) {
        r.genus[perm[v]] = t.genus[v];
        r.color[perm[v]] = t.color[v];
    }
    for (auto& e : t.edges) r.edges.push_back({perm[e[0]], perm[e[1]]});
    return r;
}

}  // namespace

TEST_CASE("partition basics") {
    Partition mu({2, 4});
    REQUIRE(mu.total() == 6);
    REQUIRE(mu.codim() == 8);
    REQUIRE(Partition({2, 2}).codim() == 4);
    REQUIRE(Partition({1, 1, 2}).codim() == 5);
    REQUIRE_THROWS_AS(Partition({0, 2}), Error);
}

TEST_CASE("canonical encoding is isomorphism invariant") {
    std::mt19937 rng(5);
    ColoredTree t = make_tree({1, 0, 1, 4}, {1, 0, 1, 2}, {{0, 1}, {1, 2}, {1, 3}});
    std::string enc = canonical_encode(t);
    std::vector<int> perm(t.n());
    std::iota(perm.begin(), perm.end(), 0);
    for (int it = 0; it < 10; ++it) {
        std::shuffle(perm.begin(), perm.end(), rng);
        REQUIRE(canonical_encode(relabel(t, perm)) == enc);
    }
    // Distinct color multisets give distinct encodings.
    ColoredTree a = make_tree({2, 2}, {1, 2}, {{0, 1}});
    ColoredTree b = make_tree({2, 2}, {2, 1}, {{0, 1}});
    REQUIRE(canonical_encode(a) == canonical_encode(b));  // same tree up to iso
    ColoredTree c = make_tree({2, 3}, {1, 2}, {{0, 1}});
    ColoredTree d = make_tree({2, 3}, {2, 1}, {{0, 1}});
    REQUIRE(canonical_encode(c) != canonical_encode(d));
}

TEST_CASE("automorphism orders") {
    // blue-2 -- green-2: trivial automorphisms.
    ColoredTree t1 = make_tree({2, 2}, {1, 2}, {{0, 1}});
    REQUIRE(automorphism_order(t1) == 1);

    // (2,4) star: genus-0 center, two blue-1 leaves, one green-4 leaf.
    ColoredTree star = make_tree({0, 1, 1, 4}, {0, 1, 1, 2}, {{0, 1}, {0, 2}, {0, 3}});
    REQUIRE(automorphism_order(star) == 2);

    // chain blue-1 -- green-2 -- blue-1: reflection.
    ColoredTree chain = make_tree({1, 2, 1}, {1, 2, 1}, {{0, 1}, {1, 2}});
    REQUIRE(automorphism_order(chain) == 2);
}

TEST_CASE("automorphism order matches brute force") {
    std::mt19937 rng(17);
    Partition mu22({2, 2});
    auto trees22 = enumerate_trees(mu22);
    for (auto& t : trees22) REQUIRE(automorphism_order(t) == brute_aut(t));
    Partition mu23({2, 3});
    for (auto& t : enumerate_trees(mu23))
        if (t.n() <= 7) REQUIRE(automorphism_order(t) == brute_aut(t));
}

TEST_CASE("tree counts match the published table") {
    REQUIRE(enumerate_trees(Partition({1, 1})).size() == 1);
    REQUIRE(enumerate_trees(Partition({2, 2})).size() == 9);
    REQUIRE(enumerate_trees(Partition({2, 3})).size() == 37);
    REQUIRE(enumerate_trees(Partition({2, 4})).size() == 153);
    REQUIRE(enumerate_trees(Partition({3, 3})).size() == 210);
}

TEST_CASE("(1,1) forces the single edge") {
    auto ts = enumerate_trees(Partition({1, 1}));
    REQUIRE(ts.size() == 1);
    REQUIRE(ts[0].n() == 2);
    REQUIRE(ts[0].genus == std::vector<int>{1, 1});
    std::vector<int> cs = ts[0].color;
    std::sort(cs.begin(), cs.end());
    REQUIRE(cs == std::vector<int>{1, 2});
}

TEST_CASE("(2,2) catalog: 4 irreducible + 5 with genus-0 vertices") {
    auto ts = enumerate_trees(Partition({2, 2}));
    REQUIRE(ts.size() == 9);
    int irreducible = 0;
    std::set<std::string> got;
    for (auto& t : ts) {
        bool has0 = false;
        for (int g : t.genus) has0 = has0 || g == 0;
        if (!has0) ++irreducible;
        got.insert(canonical_encode(t));
    }
    REQUIRE(irreducible == 4);

    // The nine pictured graphs, built by hand.
    std::vector<ColoredTree> figures = {
        // irreducible
        make_tree({2, 2}, {1, 2}, {{0, 1}}),
        make_tree({1, 2, 1}, {1, 2, 1}, {{0, 1}, {1, 2}}),
        make_tree({1, 2, 1}, {2, 1, 2}, {{0, 1}, {1, 2}}),
        make_tree({1, 1, 1, 1}, {1, 2, 1, 2}, {{0, 1}, {1, 2}, {2, 3}}),
        // with genus-0 vertices
        make_tree({1, 0, 1, 2}, {1, 0, 1, 2}, {{0, 1}, {1, 2}, {1, 3}}),
        make_tree({1, 0, 1, 2}, {2, 0, 2, 1}, {{0, 1}, {1, 2}, {1, 3}}),
        make_tree({1, 0, 1, 1, 1}, {1, 0, 1, 2, 2}, {{0, 1}, {1, 2}, {1, 3}, {1, 4}}),
        make_tree({1, 1, 0, 1, 1}, {1, 2, 0, 1, 2}, {{0, 1}, {1, 2}, {2, 3}, {2, 4}}),
        make_tree({1, 1, 0, 1, 1}, {2, 1, 0, 2, 1}, {{0, 1}, {1, 2}, {2, 3}, {2, 4}}),
    };
    std::set<std::string> expected;
    for (auto& t : figures) expected.insert(canonical_encode(t));
    REQUIRE(expected.size() == 9);
    REQUIRE(got == expected);
}

TEST_CASE("enumeration output is canonical and deduplicated") {
    auto ts = enumerate_trees(Partition({2, 3}));
    std::set<std::string> encs;
    for (auto& t : ts) {
        REQUIRE(is_valid_extremal(t, Partition({2, 3})));
        REQUIRE(t.m() <= Partition({2, 3}).codim());
        encs.insert(canonical_encode(t));
    }
    REQUIRE(encs.size() == ts.size());
    // Sizes never decrease along the output (generation by vertex count).
    for (std::size_t i = 1; i < ts.size(); ++i) REQUIRE(ts[i - 1].n() <= ts[i].n());
}

TEST_CASE("single-part partitions") {
    REQUIRE(enumerate_trees(Partition({3})).size() == 1);
    REQUIRE(enumerate_trees(Partition({1})).empty());
}

TEST_CASE("critical paths") {
    // (2,4) star: two paths {z1,z3} and {z2,z3} (edges to the two blue leaves
    // plus the green edge).
    ColoredTree star = make_tree({0, 1, 1, 4}, {0, 1, 1, 2}, {{0, 1}, {0, 2}, {0, 3}});
    auto ps = critical_paths(star);
    REQUIRE(ps.size() == 2);
    for (auto& p : ps) REQUIRE(p.edges.size() == 2);

    ColoredTree t1 = make_tree({2, 2}, {1, 2}, {{0, 1}});
    REQUIRE(critical_paths(t1).size() == 1);

    ColoredTree chain = make_tree({1, 4, 1}, {1, 2, 1}, {{0, 1}, {1, 2}});
    auto pc = critical_paths(chain);
    REQUIRE(pc.size() == 2);
    for (auto& p : pc) REQUIRE(p.edges.size() == 1);

    // c <= d over a full enumeration.
    for (auto& t : enumerate_trees(Partition({2, 3})))
        REQUIRE(critical_paths(t).size() <= static_cast<std::size_t>(Partition({2, 3}).codim()));
}

TEST_CASE("local equations") {
    ColoredTree star = make_tree({0, 1, 1, 4}, {0, 1, 1, 2}, {{0, 1}, {0, 2}, {0, 3}});
    auto eq = local_equations(star);
    REQUIRE(eq.size() == 2);
    REQUIRE(eq[0] == std::vector<int>{0, 2});
    REQUIRE(eq[1] == std::vector<int>{1, 2});

    ColoredTree t1 = make_tree({2, 2}, {1, 2}, {{0, 1}});
    REQUIRE(local_equations(t1) == std::vector<std::vector<int>>{{0}});

    // 4-chain: each edge is itself a critical path.
    ColoredTree four = make_tree({1, 1, 1, 1}, {1, 2, 1, 2}, {{0, 1}, {1, 2}, {2, 3}});
    auto eq4 = local_equations(four);
    REQUIRE(eq4 == std::vector<std::vector<int>>{{0}, {1}, {2}});
}

TEST_CASE("smoothings") {
    Partition mu24({2, 4});
    // (2,4) star admits exactly two smoothings R and S.
    ColoredTree star = make_tree({0, 1, 1, 4}, {0, 1, 1, 2}, {{0, 1}, {0, 2}, {0, 3}});
    auto sm = smoothings(star, mu24);
    REQUIRE(sm.size() == 2);
    std::set<std::string> targets;
    for (auto& s : sm) {
        REQUIRE(s.target.n() < star.n());
        REQUIRE(s.target.m() < star.m());
        REQUIRE(is_valid_extremal(s.target, mu24));
        targets.insert(canonical_encode(s.target));
    }
    ColoredTree R = make_tree({2, 4}, {1, 2}, {{0, 1}});
    ColoredTree S = make_tree({1, 4, 1}, {1, 2, 1}, {{0, 1}, {1, 2}});
    REQUIRE(targets == std::set<std::string>{canonical_encode(R), canonical_encode(S)});

    // Irreducible trees admit none.
    REQUIRE(smoothings(R, mu24).empty());
    ColoredTree t22 = make_tree({2, 2}, {1, 2}, {{0, 1}});
    REQUIRE(smoothings(t22, Partition({2, 2})).empty());
}

TEST_CASE("minimal smoothings per zero-adjacent edge are unique") {
    // For each edge with a genus-0 endpoint, the inclusion-minimal valid
    // contraction containing it is unique, and composition closure holds.
    Partition mu({2, 2});
    for (auto& t : enumerate_trees(mu)) {
        auto sm = smoothings(t, mu);
        for (int e = 0; e < t.m(); ++e) {
            if (t.genus[t.edges[e][0]] != 0 && t.genus[t.edges[e][1]] != 0) continue;
            std::vector<std::vector<int>> containing;
            for (auto& s : sm)
                if (std::find(s.contracted.begin(), s.contracted.end(), e) != s.contracted.end())
                    containing.push_back(s.contracted);
            // minimal by inclusion
            std::vector<std::vector<int>> minimal;
            for (auto& a : containing) {
                bool min = true;
                for (auto& b : containing) {
                    if (a == b) continue;
                    if (std::includes(a.begin(), a.end(), b.begin(), b.end())) min = false;
                }
                if (min) minimal.push_back(a);
            }
            REQUIRE(minimal.size() == 1);
        }
    }
}

TEST_CASE("every smoothing is a composition of minimal ones") {
    // Nontrivial contraction sets decompose as: some minimal smoothing K0
    // inside K, followed (recursively) by a valid smoothing of T/K0.
    Partition mu({2, 2});
    std::function<bool(const ColoredTree&, const std::vector<int>&)> decomposable =
        [&](const ColoredTree& t, const std::vector<int>& K) -> bool {
        auto sm = smoothings(t, mu);
        // minimal contraction sets on t
        std::vector<std::vector<int>> all;
        for (auto& s : sm) all.push_back(s.contracted);
        for (auto& s : sm) {
            if (s.contracted == K) {
                // K itself minimal?
                bool minimal = true;
                for (auto& o : all)
                    if (o != K && std::includes(K.begin(), K.end(), o.begin(), o.end()))
                        minimal = false;
                if (minimal) return true;
                // otherwise find a minimal subset and recurse on the target
                for (auto& o : all) {
                    if (o == K ||
                        !std::includes(K.begin(), K.end(), o.begin(), o.end()))
                        continue;
                    // the structure with contracted == o
                    for (auto& s0 : sm) {
                        if (s0.contracted != o) continue;
                        // remaining edges of K map into T/K0 via s0: edge e in
                        // K \ o survives as the target edge with edge_map == e
                        std::vector<int> rest;
                        for (std::size_t e2 = 0; e2 < s0.edge_map.size(); ++e2)
                            if (std::find(K.begin(), K.end(), s0.edge_map[e2]) != K.end())
                                rest.push_back(static_cast<int>(e2));
                        std::sort(rest.begin(), rest.end());
                        if (decomposable(s0.target, rest)) return true;
                    }
                }
                return false;
            }
        }
        return false;
    };
    for (auto& t : enumerate_trees(mu))
        for (auto& s : smoothings(t, mu)) REQUIRE(decomposable(t, s.contracted));
}

TEST_CASE("max-edges bound restricts the catalog") {
    REQUIRE(enumerate_trees(Partition({2, 2}), 1).size() == 1);
    REQUIRE(enumerate_trees(Partition({2, 2}), 3).size() == 6);
    // raising the cap beyond d admits trees with more edges than the default
    REQUIRE(enumerate_trees(Partition({2, 2}), 5).size() > 9);
}

TEST_CASE("smoothing fibers are connected monochromatic subtrees") {
    Partition mu({2, 3});
    auto ts = enumerate_trees(mu);
    for (std::size_t i = 0; i < ts.size(); i += 5) {
        for (auto& s : smoothings(ts[i], mu)) {
            // genus sums per fiber match the target.
            std::vector<int> sum(s.target.n(), 0);
            for (int v = 0; v < ts[i].n(); ++v) sum[s.fiber_of[v]] += ts[i].genus[v];
            for (int f = 0; f < s.target.n(); ++f) REQUIRE(sum[f] == s.target.genus[f]);
            // eps is injective into E(T).
            std::set<int> eps(s.edge_map.begin(), s.edge_map.end());
            REQUIRE(eps.size() == s.edge_map.size());
        }
    }
}
