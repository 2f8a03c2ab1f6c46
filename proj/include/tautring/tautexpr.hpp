#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tautring/rational.hpp"

namespace tautring {

// One decorated boundary-stratum term: a stable tree with genus and marking
// data per vertex, a lambda/kappa monomial per vertex, a psi power per
// half-edge and per marking.
struct DecoratedGraphTerm {
    Rat coeff;
    std::vector<int> genus;                      // per vertex
    std::vector<std::vector<int>> legs;          // markings carried by each vertex (1-based)
    std::vector<std::array<int, 2>> edges;       // vertex pairs
    std::vector<std::array<int, 2>> edge_psi;    // psi powers at the two half-edges
    std::vector<std::map<int, int>> lambda_dec;  // per vertex: lambda index -> power
    std::vector<std::map<int, int>> kappa_dec;   // per vertex: kappa index -> power
    std::map<int, int> marking_psi;              // marking -> psi power

    int n_vertices() const { return static_cast<int>(genus.size()); }

    int valence(int v) const {
        int val = static_cast<int>(legs[v].size());
        for (auto& e : edges) val += (e[0] == v) + (e[1] == v);
        return val;
    }

    int decoration_degree() const {
        int d = 0;
        for (auto& m : lambda_dec)
            for (auto& [i, p] : m) d += i * p;
        for (auto& m : kappa_dec)
            for (auto& [i, p] : m) d += i * p;
        for (auto& e : edge_psi) d += e[0] + e[1];
        for (auto& [i, p] : marking_psi) d += p;
        return d;
    }

    // Codimension of the term: number of edges plus decoration degree.
    int codim() const { return static_cast<int>(edges.size()) + decoration_degree(); }

    bool is_stable() const {
        for (int v = 0; v < n_vertices(); ++v)
            if (2 * genus[v] - 2 + valence(v) <= 0) return false;
        return true;
    }

    // Isomorphism-invariant key (coefficient excluded): minimum over all
    // rootings of a decorated AHU encoding. Cached after the first call:
    // coefficient updates keep the cache valid, structural edits after the
    // first call do not (build terms fully before querying the key).
    const std::string& canonical_key() const {
        if (key_cache_.empty()) key_cache_ = compute_key();
        return key_cache_;
    }

private:
    mutable std::string key_cache_;

    std::string compute_key() const {
        int n = n_vertices();
        if (n == 0) return "<empty>";
        std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, edge index)
        for (std::size_t e = 0; e < edges.size(); ++e) {
            adj[edges[e][0]].push_back({edges[e][1], static_cast<int>(e)});
            adj[edges[e][1]].push_back({edges[e][0], static_cast<int>(e)});
        }
        std::string best;
        for (int root = 0; root < n; ++root) {
            std::string enc = encode(root, -1, -1, adj);
            if (best.empty() || enc < best) best = enc;
        }
        return best;
    }

    std::string tag(int v) const {
        std::string s = "g" + std::to_string(genus[v]) + "[";
        std::vector<int> ls = legs[v];
        std::sort(ls.begin(), ls.end());
        for (int x : ls) {
            s += std::to_string(x);
            auto it = marking_psi.find(x);
            if (it != marking_psi.end() && it->second > 0)
                s += "p" + std::to_string(it->second);
            s += ";";
        }
        s += "]L(";
        for (auto& [i, p] : lambda_dec[v]) s += std::to_string(i) + "^" + std::to_string(p) + ";";
        s += ")K(";
        for (auto& [i, p] : kappa_dec[v]) s += std::to_string(i) + "^" + std::to_string(p) + ";";
        s += ")";
        return s;
    }

    std::string encode(int v, int parent, int paredge,
                       const std::vector<std::vector<std::pair<int, int>>>& adj) const {
        std::vector<std::string> childEnc;
        for (auto& [w, e] : adj[v]) {
            if (w == parent && e == paredge) continue;
            childEnc.push_back(encode(w, v, e, adj));
        }
        std::sort(childEnc.begin(), childEnc.end());
        std::string s = "(";
        if (paredge >= 0) {
            // psi powers on the half-edges, own side first
            int side = edges[paredge][0] == v ? 0 : 1;
            s += "e" + std::to_string(edge_psi[paredge][side]) + "," +
                 std::to_string(edge_psi[paredge][1 - side]) + "|";
        }
        s += tag(v);
        for (auto& c : childEnc) s += c;
        s += ")";
        return s;
    }
};

// Deterministic serialization of a term's stored labeling (coefficient
// excluded); used to pick a canonical representative among isomorphic terms.
inline std::string term_serial(const DecoratedGraphTerm& t) {
    std::string s = "G";
    for (int v = 0; v < t.n_vertices(); ++v) {
        s += std::to_string(t.genus[v]) + "[";
        for (int m : t.legs[v]) s += std::to_string(m) + ",";
        s += "]L";
        for (auto& [i, p] : t.lambda_dec[v]) s += std::to_string(i) + "^" + std::to_string(p) + ";";
        s += "K";
        for (auto& [i, p] : t.kappa_dec[v]) s += std::to_string(i) + "^" + std::to_string(p) + ";";
        s += "|";
    }
    s += "E";
    for (std::size_t e = 0; e < t.edges.size(); ++e)
        s += "(" + std::to_string(t.edges[e][0]) + "," + std::to_string(t.edges[e][1]) + ":" +
             std::to_string(t.edge_psi[e][0]) + "," + std::to_string(t.edge_psi[e][1]) + ")";
    s += "P";
    for (auto& [m, p] : t.marking_psi) s += std::to_string(m) + "^" + std::to_string(p) + ";";
    return s;
}

// Formal Q-combination of decorated graph terms on a fixed ambient (g, n).
struct TautExpr {
    int g = 0;
    int n = 0;
    std::vector<DecoratedGraphTerm> terms;

    // Merges terms with identical canonical key and drops zero coefficients.
    // Among isomorphic representatives the one with the smallest stored
    // serialization is kept, so the result is independent of arrival order.
    void normalize() {
        std::map<std::string, DecoratedGraphTerm> merged;
        for (auto& t : terms) {
            std::string key = t.canonical_key();
            auto it = merged.find(key);
            if (it == merged.end()) {
                merged.emplace(key, t);
            } else {
                Rat total = it->second.coeff + t.coeff;
                if (term_serial(t) < term_serial(it->second)) it->second = t;
                it->second.coeff = total;
            }
        }
        terms.clear();
        for (auto& [key, t] : merged)
            if (!t.coeff.is_zero()) terms.push_back(t);
    }

    TautExpr& operator+=(const TautExpr& o) {
        if (o.g != g || o.n != n) throw Error("BadAmbient", "mixed ambient (g,n)");
        for (auto& t : o.terms) terms.push_back(t);
        normalize();
        return *this;
    }

    TautExpr scaled(const Rat& s) const {
        TautExpr r(*this);
        for (auto& t : r.terms) t.coeff *= s;
        r.normalize();
        return r;
    }
};

}  // namespace tautring
