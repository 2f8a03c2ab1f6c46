#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "tautring/rational.hpp"

namespace tautring {

// Ordered partition of g into positive parts; colors are the part positions
// (1-based).
struct Partition {
    std::vector<int> parts;

    explicit Partition(std::vector<int> p) : parts(std::move(p)) {
        if (parts.empty()) throw Error("BadPartition", "partition needs at least one part");
        for (int x : parts)
            if (x < 1) throw Error("BadPartition", "parts must be positive");
    }

    int total() const {
        int g = 0;
        for (int x : parts) g += x;
        return g;
    }
    int size() const { return static_cast<int>(parts.size()); }

    // codim of the product cycle: sum_{i<j} g_i g_j.
    int codim() const {
        int d = 0;
        for (std::size_t i = 0; i < parts.size(); ++i)
            for (std::size_t j = i + 1; j < parts.size(); ++j) d += parts[i] * parts[j];
        return d;
    }

    std::string str() const {
        std::string s;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(parts[i]);
        }
        return s;
    }
};

// Genus- and color-labeled stable tree. color[v] == 0 means no color (the
// vertex has genus 0); positive colors are 1..k.
struct ColoredTree {
    std::vector<int> genus;
    std::vector<int> color;
    std::vector<std::array<int, 2>> edges;

    int n() const { return static_cast<int>(genus.size()); }
    int m() const { return static_cast<int>(edges.size()); }

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(genus.size());
        for (auto& e : edges) {
            adj[e[0]].push_back(e[1]);
            adj[e[1]].push_back(e[0]);
        }
        return adj;
    }

    std::vector<int> valences() const {
        std::vector<int> val(genus.size(), 0);
        for (auto& e : edges) {
            ++val[e[0]];
            ++val[e[1]];
        }
        return val;
    }
};

struct CanonicalForm {
    std::string encoding;
    std::vector<int> vertex_map;  // original vertex -> canonical preorder index
    long long rooted_aut = 1;     // |Aut| of the tree (genus/color preserving)
};

namespace detail_trees {

struct Encoder {
    const ColoredTree& t;
    std::vector<std::vector<int>> adj;

    explicit Encoder(const ColoredTree& tree) : t(tree), adj(tree.adjacency()) {}

    std::string tag(int v) const {
        return std::to_string(t.genus[v]) + ":" + std::to_string(t.color[v]);
    }

    // Rooted canonical encoding; fills order with vertices in canonical
    // preorder and multiplies aut by the sibling-symmetry factor.
    std::string encode(int v, int parent, std::vector<int>* order, long long* aut) const {
        struct Child {
            std::string enc;
            int vertex;
            std::vector<int> suborder;
        };
        std::vector<Child> children;
        for (int w : adj[v]) {
            if (w == parent) continue;
            Child c;
            c.vertex = w;
            std::vector<int> sub;
            c.enc = encode(w, v, order ? &sub : nullptr, aut);
            c.suborder = std::move(sub);
            children.push_back(std::move(c));
        }
        std::sort(children.begin(), children.end(), [](const Child& a, const Child& b) {
            if (a.enc != b.enc) return a.enc < b.enc;
            return a.vertex < b.vertex;
        });
        if (aut) {
            long long run = 1;
            for (std::size_t i = 1; i <= children.size(); ++i) {
                if (i < children.size() && children[i].enc == children[i - 1].enc) {
                    ++run;
                } else {
                    for (long long r = 2; r <= run; ++r) *aut *= r;
                    run = 1;
                }
            }
        }
        std::string enc = "(" + tag(v);
        if (order) order->push_back(v);
        for (auto& c : children) {
            enc += c.enc;
            if (order)
                for (int w : c.suborder) order->push_back(w);
        }
        enc += ")";
        return enc;
    }

    // O(n^2) centroid computation (n is tiny here).
    std::vector<int> centroids() const {
        int n = t.n();
        std::vector<int> best;
        int minmax = n + 1;
        for (int v = 0; v < n; ++v) {
            int mx = 0;
            std::vector<int> seen(n, 0);
            seen[v] = 1;
            for (int w : adj[v]) {
                if (seen[w]) continue;
                int cnt = 0;
                std::vector<int> stack = {w};
                seen[w] = 1;
                while (!stack.empty()) {
                    int x = stack.back();
                    stack.pop_back();
                    ++cnt;
                    for (int y : adj[x])
                        if (!seen[y]) {
                            seen[y] = 1;
                            stack.push_back(y);
                        }
                }
                mx = std::max(mx, cnt);
            }
            if (mx < minmax) {
                minmax = mx;
                best = {v};
            } else if (mx == minmax) {
                best.push_back(v);
            }
        }
        return best;
    }
};

}  // namespace detail_trees

// Isomorphism-invariant canonical form: root at the centroid (smaller rooted
// encoding of the two when the tree is bicentroidal), children ordered by
// encoding. Equal encodings <=> genus- and color-preserving isomorphism.
inline CanonicalForm canonical_form(const ColoredTree& t) {
    if (t.n() == 0) throw Error("BadTree", "empty tree");
    detail_trees::Encoder enc(t);
    auto cents = enc.centroids();
    std::string bestEnc;
    int bestRoot = -1;
    for (int c : cents) {
        std::string e = enc.encode(c, -1, nullptr, nullptr);
        if (bestRoot < 0 || e < bestEnc) {
            bestEnc = e;
            bestRoot = c;
        }
    }
    CanonicalForm cf;
    std::vector<int> order;
    long long aut = 1;
    cf.encoding = enc.encode(bestRoot, -1, &order, &aut);
    cf.vertex_map.assign(t.n(), -1);
    for (std::size_t i = 0; i < order.size(); ++i) cf.vertex_map[order[i]] = static_cast<int>(i);
    if (cents.size() == 2) {
        // Extra factor 2 when an automorphism swaps the two centroids, i.e.
        // the two halves across the centroid edge are isomorphic.
        int c1 = cents[0], c2 = cents[1];
        std::string h1 = enc.encode(c1, c2, nullptr, nullptr);
        std::string h2 = enc.encode(c2, c1, nullptr, nullptr);
        if (h1 == h2) aut *= 2;
    }
    cf.rooted_aut = aut;
    return cf;
}

inline std::string canonical_encode(const ColoredTree& t) { return canonical_form(t).encoding; }

// Order of the genus- and color-preserving automorphism group.
inline long long automorphism_order(const ColoredTree& t) { return canonical_form(t).rooted_aut; }

// Rewrites the tree with vertices renumbered in canonical order. Edge i of
// the result is the edge whose deeper endpoint has canonical index i+1.
inline ColoredTree canonicalize(const ColoredTree& t, std::vector<int>* vertex_map = nullptr,
                                std::vector<int>* edge_map = nullptr) {
    CanonicalForm cf = canonical_form(t);
    ColoredTree out;
    out.genus.assign(t.n(), 0);
    out.color.assign(t.n(), 0);
    for (int v = 0; v < t.n(); ++v) {
        out.genus[cf.vertex_map[v]] = t.genus[v];
        out.color[cf.vertex_map[v]] = t.color[v];
    }
    out.edges.assign(t.m(), {0, 0});
    if (edge_map) edge_map->assign(t.m(), -1);
    for (int e = 0; e < t.m(); ++e) {
        int a = cf.vertex_map[t.edges[e][0]];
        int b = cf.vertex_map[t.edges[e][1]];
        int child = std::max(a, b);
        int idx = child - 1;
        out.edges[idx] = {std::min(a, b), std::max(a, b)};
        if (edge_map) (*edge_map)[e] = idx;
    }
    if (vertex_map) *vertex_map = cf.vertex_map;
    return out;
}

// Minimal path between two positive-genus vertices of distinct colors whose
// interior is all genus 0.
struct CriticalPath {
    int a, b;               // endpoint vertices
    std::vector<int> edges; // edge indices along the path
};

inline std::vector<int> tree_path_edges(const ColoredTree& t, int a, int b) {
    int n = t.n();
    std::vector<int> par(n, -1), paredge(n, -1);
    std::vector<int> stack = {a};
    std::vector<char> vis(n, 0);
    vis[a] = 1;
    auto adj = t.adjacency();
    std::map<std::pair<int, int>, int> eidx;
    for (int e = 0; e < t.m(); ++e) {
        eidx[{t.edges[e][0], t.edges[e][1]}] = e;
        eidx[{t.edges[e][1], t.edges[e][0]}] = e;
    }
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[v])
            if (!vis[w]) {
                vis[w] = 1;
                par[w] = v;
                paredge[w] = eidx[{v, w}];
                stack.push_back(w);
            }
    }
    std::vector<int> out;
    for (int v = b; v != a; v = par[v]) out.push_back(paredge[v]);
    std::reverse(out.begin(), out.end());
    return out;
}

inline std::vector<int> tree_path_vertices(const ColoredTree& t, int a, int b) {
    auto edgesOnPath = tree_path_edges(t, a, b);
    std::vector<int> verts = {a};
    int cur = a;
    for (int e : edgesOnPath) {
        cur = (t.edges[e][0] == cur) ? t.edges[e][1] : t.edges[e][0];
        verts.push_back(cur);
    }
    return verts;
}

// All critical paths, ordered by (a, b) with a < b.
inline std::vector<CriticalPath> critical_paths(const ColoredTree& t) {
    std::vector<CriticalPath> out;
    for (int a = 0; a < t.n(); ++a) {
        if (t.genus[a] == 0) continue;
        for (int b = a + 1; b < t.n(); ++b) {
            if (t.genus[b] == 0 || t.color[a] == t.color[b]) continue;
            auto verts = tree_path_vertices(t, a, b);
            bool ok = true;
            for (std::size_t i = 1; i + 1 < verts.size(); ++i)
                if (t.genus[verts[i]] != 0) { ok = false; break; }
            if (!ok) continue;
            CriticalPath p;
            p.a = a;
            p.b = b;
            p.edges = tree_path_edges(t, a, b);
            out.push_back(std::move(p));
        }
    }
    return out;
}

// Validity of a mu-colored extremal tree: genus sums per color, stability,
// and the critical-path cover condition on every edge.
inline bool is_valid_extremal(const ColoredTree& t, const Partition& mu) {
    int k = mu.size();
    std::vector<int> sums(k + 1, 0);
    for (int v = 0; v < t.n(); ++v) {
        if (t.genus[v] < 0) return false;
        if (t.genus[v] == 0 && t.color[v] != 0) return false;
        if (t.genus[v] > 0 && (t.color[v] < 1 || t.color[v] > k)) return false;
        if (t.color[v] >= 1) sums[t.color[v]] += t.genus[v];
    }
    for (int i = 1; i <= k; ++i)
        if (sums[i] != mu.parts[i - 1]) return false;
    auto val = t.valences();
    for (int v = 0; v < t.n(); ++v)
        if (2 * t.genus[v] - 2 + val[v] <= 0) return false;
    // connectivity: |E| = |V|-1 plus reachability
    if (t.m() != t.n() - 1) return false;
    if (t.n() > 1) {
        auto adj = t.adjacency();
        std::vector<char> vis(t.n(), 0);
        std::vector<int> stack = {0};
        vis[0] = 1;
        int cnt = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[v])
                if (!vis[w]) { vis[w] = 1; ++cnt; stack.push_back(w); }
        }
        if (cnt != t.n()) return false;
    }
    // every edge on at least one critical path
    std::vector<char> covered(t.m(), 0);
    for (auto& p : critical_paths(t))
        for (int e : p.edges) covered[e] = 1;
    for (int e = 0; e < t.m(); ++e)
        if (!covered[e]) return false;
    return true;
}

// One squarefree monomial (edge set) per critical path, in canonical order.
inline std::vector<std::vector<int>> local_equations(const ColoredTree& t) {
    std::vector<std::vector<int>> out;
    for (auto& p : critical_paths(t)) {
        std::vector<int> mono = p.edges;
        std::sort(mono.begin(), mono.end());
        out.push_back(std::move(mono));
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace detail_trees {

// Beyer-Hedetniemi rooted tree level sequences on n vertices.
inline std::vector<std::vector<int>> rooted_level_sequences(int n) {
    std::vector<std::vector<int>> out;
    if (n == 0) return out;
    std::vector<int> L(n);
    for (int i = 0; i < n; ++i) L[i] = i + 1;
    out.push_back(L);
    if (n <= 2) return out;
    for (;;) {
        int p = -1;
        for (int i = n - 1; i >= 0; --i)
            if (L[i] > 2) { p = i; break; }
        if (p < 0) break;
        int q = -1;
        for (int i = p - 1; i >= 0; --i)
            if (L[i] == L[p] - 1) { q = i; break; }
        for (int i = p; i < n; ++i) L[i] = L[i - (p - q)];
        out.push_back(L);
    }
    return out;
}

inline ColoredTree tree_from_levels(const std::vector<int>& L) {
    ColoredTree t;
    int n = static_cast<int>(L.size());
    t.genus.assign(n, 0);
    t.color.assign(n, 0);
    std::vector<int> lastAt(n + 2, -1);
    for (int i = 0; i < n; ++i) {
        if (L[i] > 1) t.edges.push_back({lastAt[L[i] - 1], i});
        lastAt[L[i]] = i;
    }
    return t;
}

// All free tree shapes on n vertices (genus/color zeroed), one per
// isomorphism class.
inline const std::vector<ColoredTree>& free_tree_shapes(int n) {
    static std::map<int, std::vector<ColoredTree>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<ColoredTree> shapes;
    std::unordered_set<std::string> seen;
    for (auto& L : rooted_level_sequences(n)) {
        ColoredTree t = tree_from_levels(L);
        std::string enc = canonical_encode(t);
        if (seen.insert(enc).second) shapes.push_back(canonicalize(t));
    }
    return cache.emplace(n, std::move(shapes)).first->second;
}

struct AssignSearch {
    const ColoredTree& shape;
    const Partition& mu;
    std::vector<std::vector<int>> adj;
    std::vector<int> val;
    std::vector<int> order;   // BFS order of assignment
    std::vector<int> genus;   // -1 = unassigned
    std::vector<int> color;
    std::vector<int> budget;  // per color (1-based)
    std::vector<std::pair<std::string, ColoredTree>>* found;
    std::unordered_set<std::string>* seen;

    AssignSearch(const ColoredTree& s, const Partition& m,
                 std::vector<std::pair<std::string, ColoredTree>>* f,
                 std::unordered_set<std::string>* sn)
        : shape(s), mu(m), adj(s.adjacency()), val(s.valences()), found(f), seen(sn) {
        int n = s.n();
        genus.assign(n, -1);
        color.assign(n, 0);
        budget.assign(m.size() + 1, 0);
        for (int i = 1; i <= m.size(); ++i) budget[i] = m.parts[i - 1];
        // BFS order from vertex 0 so each vertex after the first has an
        // assigned neighbor.
        std::vector<char> vis(n, 0);
        order.push_back(0);
        vis[0] = 1;
        for (std::size_t i = 0; i < order.size(); ++i)
            for (int w : adj[order[i]])
                if (!vis[w]) { vis[w] = 1; order.push_back(w); }
    }

    void run() { rec(0, shape.n()); }

    void rec(int pos, int unassigned) {
        if (pos == static_cast<int>(order.size())) {
            for (std::size_t i = 1; i < budget.size(); ++i)
                if (budget[i] != 0) return;
            ColoredTree t = shape;
            t.genus = genus;
            t.color = color;
            if (!is_valid_extremal(t, mu)) return;
            std::string enc = canonical_encode(t);
            if (seen->insert(enc).second) found->emplace_back(enc, canonicalize(t));
            return;
        }
        int v = order[pos];
        int totalBudget = 0, needColors = 0;
        for (std::size_t i = 1; i < budget.size(); ++i) {
            totalBudget += budget[i];
            if (budget[i] > 0) ++needColors;
        }
        // Each remaining vertex uses >= 1 budget unless it may be genus 0.
        int flexible = 0;
        for (int i = pos; i < static_cast<int>(order.size()); ++i)
            if (val[order[i]] >= 3) ++flexible;
        if (totalBudget < unassigned - flexible) return;
        if (needColors > unassigned) return;

        // Option: genus 0 (needs valence >= 3).
        if (val[v] >= 3) {
            genus[v] = 0;
            color[v] = 0;
            rec(pos + 1, unassigned - 1);
            genus[v] = -1;
        }
        // Option: color c with genus x.
        for (int c = 1; c < static_cast<int>(budget.size()); ++c) {
            if (budget[c] == 0) continue;
            bool clash = false;
            for (int w : adj[v])
                if (genus[w] > 0 && color[w] == c) { clash = true; break; }
            if (clash) continue;  // same-color positive adjacency can never be covered
            for (int x = 1; x <= budget[c]; ++x) {
                genus[v] = x;
                color[v] = c;
                budget[c] -= x;
                rec(pos + 1, unassigned - 1);
                budget[c] += x;
            }
            genus[v] = -1;
            color[v] = 0;
        }
    }
};

}  // namespace detail_trees

// All mu-colored extremal trees with at most max_edges edges (default: the
// codimension bound d = sum_{i<j} g_i g_j), one per isomorphism class, in
// canonical vertex order, sorted by (vertex count, encoding).
inline std::vector<ColoredTree> enumerate_trees(const Partition& mu,
                                                std::optional<int> max_edges = std::nullopt) {
    int me = max_edges.value_or(mu.codim());
    std::vector<std::pair<std::string, ColoredTree>> found;
    std::unordered_set<std::string> seen;
    if (mu.size() == 1) {
        // Single color: the one-vertex tree, stable only for g >= 2.
        if (mu.parts[0] >= 2) {
            ColoredTree t;
            t.genus = {mu.parts[0]};
            t.color = {1};
            return {t};
        }
        return {};
    }
    for (int n = 2; n <= me + 1; ++n) {
        std::vector<std::pair<std::string, ColoredTree>> layer;
        for (auto& shape : detail_trees::free_tree_shapes(n)) {
            detail_trees::AssignSearch search(shape, mu, &layer, &seen);
            search.run();
        }
        std::sort(layer.begin(), layer.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [enc, t] : layer) found.emplace_back(enc, t);
    }
    std::vector<ColoredTree> out;
    out.reserve(found.size());
    for (auto& [enc, t] : found) out.push_back(t);
    return out;
}

// A smoothing structure given by the contracted edge set: fibers are the
// connected components of (V, K); the target is T/K.
struct SmoothingStructure {
    std::vector<int> contracted;  // edge indices K, sorted
    ColoredTree target;           // T/K (vertices = fibers, in fiber order)
    std::vector<int> fiber_of;    // phi: vertex of T -> vertex of target
    std::vector<int> edge_map;    // eps: edge index of target -> edge index of T
};

// All nontrivial smoothing structures on t: every nonempty edge subset whose
// contraction yields a valid mu-colored extremal tree. Distinct structures
// are listed separately even when targets are isomorphic.
inline std::vector<SmoothingStructure> smoothings(const ColoredTree& t, const Partition& mu) {
    std::vector<SmoothingStructure> out;
    int m = t.m();
    if (m >= 30) throw Error("TooLarge", "edge count too large for subset enumeration");
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        // fibers = components of contracted subgraph
        std::vector<int> comp(t.n(), -1);
        std::vector<std::vector<int>> adj(t.n());
        for (int e = 0; e < m; ++e) {
            if (!(mask >> e & 1)) continue;
            adj[t.edges[e][0]].push_back(t.edges[e][1]);
            adj[t.edges[e][1]].push_back(t.edges[e][0]);
        }
        int nc = 0;
        for (int v = 0; v < t.n(); ++v) {
            if (comp[v] >= 0) continue;
            std::vector<int> stack = {v};
            comp[v] = nc;
            while (!stack.empty()) {
                int x = stack.back();
                stack.pop_back();
                for (int y : adj[x])
                    if (comp[y] < 0) { comp[y] = nc; stack.push_back(y); }
            }
            ++nc;
        }
        // fiber color consistency
        std::vector<int> fgenus(nc, 0), fcolor(nc, 0);
        bool ok = true;
        for (int v = 0; v < t.n() && ok; ++v) {
            int c = comp[v];
            fgenus[c] += t.genus[v];
            if (t.genus[v] > 0) {
                if (fcolor[c] == 0) fcolor[c] = t.color[v];
                else if (fcolor[c] != t.color[v]) ok = false;
            }
        }
        if (!ok) continue;
        SmoothingStructure s;
        s.target.genus = fgenus;
        s.target.color = fcolor;
        s.fiber_of = comp;
        for (int e = 0; e < m; ++e) {
            if (mask >> e & 1) {
                s.contracted.push_back(e);
                continue;
            }
            s.target.edges.push_back({comp[t.edges[e][0]], comp[t.edges[e][1]]});
            s.edge_map.push_back(e);
        }
        if (!is_valid_extremal(s.target, mu)) continue;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace tautring
