#pragma once

#include <atomic>
#include <tuple>
#include <map>
#include <mutex>
#include <thread>
#include <string>
#include <vector>

#include "tautring/mpoly.hpp"
#include "tautring/tautexpr.hpp"
#include "tautring/trees.hpp"

namespace tautring {

inline std::string edge_var(int i) { return "z" + std::to_string(i + 1); }
inline std::string chern_var(int i) { return "C" + std::to_string(i); }
inline std::string root_sym_var(int j) { return "s" + std::to_string(j); }

// Local excess-intersection model of a tree: a rank-d bundle O^c + L_1 + ... +
// L_{d-c} over the node deformation space, with total Chern class
// prod_j (1 + l_j) * prod_P (1 + sum_{e in P} z_e). Root variables enter only
// through their elementary symmetric polynomials s_j, so the model is carried
// in (s_j, z_e) form.
struct LocalModel {
    ColoredTree tree;  // canonical vertex order
    int d = 0;         // codimension sum_{i<j} g_i g_j
    int c = 0;         // number of critical paths
    std::vector<CriticalPath> paths;

    LocalModel(const ColoredTree& t, const Partition& mu) : tree(t), d(mu.codim()) {
        paths = critical_paths(tree);
        c = static_cast<int>(paths.size());
        if (c > d) throw Error("Internal", "critical path count exceeds codimension");
    }

    // prod_P (1 + sum_{e in P} z_e), a polynomial in the edge variables.
    MPoly path_product() const {
        MPoly p = MPoly::one();
        for (auto& pp : paths) {
            MPoly u = MPoly::one();
            for (int e : pp.edges) u += MPoly::var(edge_var(e));
            p = p * u;
        }
        return p;
    }

    // c(N) in (s, z) variables: (1 + s_1 + ... + s_{d-c}) * path_product.
    MPoly chern_total() const {
        MPoly s = MPoly::one();
        for (int j = 1; j <= d - c; ++j) s += MPoly::var(root_sym_var(j), j);
        return s * path_product();
    }

    // Degree-i part of c(N).
    MPoly chern_part(int i) const { return chern_total().graded_piece(i); }

    // c_d(N) = s_{d-c} * prod_P (sum_{e in P} z_e).
    MPoly top_chern() const { return chern_total().graded_piece(d); }

    // c(N) with the root variables expanded: substitutes s_j -> e_j(l_1..l_{d-c}).
    MPoly chern_total_roots() const {
        std::vector<std::string> roots;
        for (int j = 1; j <= d - c; ++j) roots.push_back("l" + std::to_string(j));
        std::map<std::string, MPoly> sub;
        for (int j = 1; j <= d - c; ++j)
            sub[root_sym_var(j)] = detail::elementary_symmetric_poly(roots, j);
        return chern_total().substitute(sub);
    }
};

// The recursively computed excess contribution of a tree, stored in universal
// form: a polynomial in the edge variables z_e and Chern symbols C_i = c_i(N),
// homogeneous of degree d - |E(T)|.
struct ContPoly {
    ColoredTree tree;  // canonical order
    MPoly expr;        // in z_e (weight 1) and C_i (weight i)
};

namespace detail_excess {

// Substitution s_a -> sum_b C_{a-b} * [path_product^{-1}]_b, the inverse of
// c(N) = (sum s) * prod(1+u_P) per graded piece.
inline std::map<std::string, MPoly> sym_to_chern(const LocalModel& model) {
    std::map<std::string, MPoly> sub;
    int top = model.d - model.c;
    if (top == 0) return sub;
    MPoly inv = model.path_product().series_inverse(top);
    for (int a = 1; a <= top; ++a) {
        MPoly acc = inv.graded_piece(a);  // C_0 = 1 term
        for (int i = 1; i <= a; ++i)
            acc += MPoly::var(chern_var(i), i) * inv.graded_piece(a - i);
        sub[root_sym_var(a)] = acc;
    }
    return sub;
}

// C_i -> degree-i part of this model's c(N), for embedding a universal
// contribution into an ambient tree's model.
inline std::map<std::string, MPoly> chern_to_model(const LocalModel& model) {
    std::map<std::string, MPoly> sub;
    MPoly total = model.chern_total();
    for (int i = 1; i <= model.d; ++i) sub[chern_var(i)] = total.graded_piece(i);
    return sub;
}

}  // namespace detail_excess

inline bool is_irreducible(const ColoredTree& t) {
    for (int g : t.genus)
        if (g == 0) return false;
    return true;
}

// Base case: tree with no genus-0 vertices, every edge a critical path.
// Cont_I = [c(N) / prod_e (1 + z_e)]_{d-c} in (z, C) form.
inline ContPoly cont_irreducible(const ColoredTree& t, const Partition& mu) {
    if (!is_irreducible(t)) throw Error("NotIrreducible", "tree has genus-0 vertices");
    LocalModel model(t, mu);
    if (model.c != t.m()) throw Error("Internal", "irreducible tree with non-edge critical path");
    int top = model.d - model.c;
    std::vector<std::string> zs;
    for (int e = 0; e < t.m(); ++e) zs.push_back(edge_var(e));
    MPoly inv = product_one_plus(zs).series_inverse(top);
    MPoly expr = inv.graded_piece(top);
    for (int i = 1; i <= std::min(model.d, top); ++i)
        expr += MPoly::var(chern_var(i), i) * inv.graded_piece(top - i);
    ContPoly out;
    out.tree = t;
    out.expr = expr;
    return out;
}

// Memoized recursive contribution per Cont_T * prod z_e =
// c_d(N) - sum_{T'} iota_* Cont_{T'}; the pushforward multiplies the
// relabeled universal Cont_{T'} by prod_{e' in E(T')} z_{eps(e')} and reads
// the Chern symbols in the ambient model.
class ContEngine {
public:
    explicit ContEngine(const Partition& mu) : mu_(mu) {}

    const Partition& partition() const { return mu_; }

    // t must be in canonical vertex order.
    const ContPoly& contribution(const ColoredTree& t) {
        std::string key = canonical_encode(t);
        {
            std::lock_guard<std::mutex> lk(mu_lock_);
            auto it = memo_.find(key);
            if (it != memo_.end()) return it->second;
        }
        ContPoly result = compute(t);
        std::lock_guard<std::mutex> lk(mu_lock_);
        return memo_.emplace(key, std::move(result)).first->second;
    }

    // Right-hand side reconstruction used by the self-consistency check:
    // instantiates Cont_T in the model, multiplies by prod z_e, adds the
    // pushforwards of all smoothings, and compares against c_d(N).
    bool verify_consistency(const ColoredTree& t) {
        LocalModel model(t, mu_);
        const ContPoly& cont = contribution(t);
        auto chern = detail_excess::chern_to_model(model);
        MPoly lhs = cont.expr.substitute(chern);
        for (int e = 0; e < t.m(); ++e) lhs = lhs * MPoly::var(edge_var(e));
        for (auto& s : smoothings(t, mu_)) lhs += pushforward(model, s);
        return lhs == model.top_chern();
    }

private:
    ContPoly compute(const ColoredTree& t) {
        if (is_irreducible(t)) return cont_irreducible(t, mu_);
        LocalModel model(t, mu_);
        MPoly rhs = model.top_chern();
        for (auto& s : smoothings(t, mu_)) rhs -= pushforward(model, s);
        std::map<std::string, int> allz;
        for (int e = 0; e < t.m(); ++e) allz[edge_var(e)] = 1;
        MPoly quotient;
        try {
            quotient = rhs.divide_by_monomial(allz);
        } catch (const Error&) {
            throw Error("NotDivisible",
                        "excess right-hand side not divisible by the edge product");
        }
        ContPoly out;
        out.tree = t;
        out.expr = quotient.substitute(detail_excess::sym_to_chern(model));
        return out;
    }

    // iota_{T'*} Cont_{T'} inside the ambient model.
    MPoly pushforward(const LocalModel& model, const SmoothingStructure& s) {
        std::vector<int> vmap, emap;
        ColoredTree canon = canonicalize(s.target, &vmap, &emap);
        const ContPoly& sub = contribution(canon);
        // canonical target edge j corresponds to ambient edge amb[j].
        std::vector<int> amb(canon.m(), -1);
        for (int e = 0; e < static_cast<int>(emap.size()); ++e) amb[emap[e]] = s.edge_map[e];
        std::map<std::string, std::string> names;
        for (int j = 0; j < canon.m(); ++j) names["@" + edge_var(j)] = edge_var(amb[j]);
        // two-step rename to avoid collisions between source and target labels
        std::map<std::string, std::string> step1;
        for (int j = 0; j < canon.m(); ++j) step1[edge_var(j)] = "@" + edge_var(j);
        MPoly relabeled = sub.expr.rename(step1).rename(names);
        MPoly out = relabeled.substitute(detail_excess::chern_to_model(model));
        for (int j = 0; j < canon.m(); ++j) out = out * MPoly::var(edge_var(amb[j]));
        return out;
    }

    Partition mu_;
    std::map<std::string, ContPoly> memo_;
    std::mutex mu_lock_;
};

inline ContPoly cont_recursive(const ColoredTree& t, const Partition& mu) {
    ContEngine engine(mu);
    return engine.contribution(canonicalize(t));
}

// Pretty-printer in the style used for the printed contribution polynomials:
// groups by descending Chern symbol, z-monomials in graded-lex order.
inline std::string cont_pretty(const ContPoly& cont, int d) {
    std::string out;
    bool first = true;
    for (int i = d; i >= 0; --i) {
        MPoly q = cont.expr.coefficient_of(chern_var(i), 1);
        if (i == 0) {
            // the part with no Chern symbol at all
            q = cont.expr;
            for (int j = 1; j <= d; ++j) q = q.coefficient_of(chern_var(j), 0);
        }
        if (q.is_zero()) continue;
        std::string qs = q.str();
        bool isOne = (qs == "1");
        std::string piece;
        if (i == 0) piece = qs;
        else if (isOne) piece = "c" + std::to_string(i) + "(N)";
        else piece = "(" + qs + ")*c" + std::to_string(i) + "(N)";
        if (!first) out += " + ";
        out += piece;
        first = false;
    }
    if (out.empty()) out = "0";
    return out;
}

// Chern classes of E'~ (x) E''~ for bundles of ranks r1, r2 with formal roots
// a_i, b_j: the tensor of duals has roots -a_i - b_j. Returned as c_1..c_upto
// in the elementary symmetric classes lp_i = e_i(a), lq_j = e_j(b).
inline std::vector<MPoly> box_tensor_chern(int r1, int r2, int up_to, int rank_cap = 49) {
    if (r1 < 1 || r2 < 1) throw Error("BadRank", "ranks must be >= 1");
    if (r1 * r2 > rank_cap)
        throw Error("RankOverflow", "box-tensor rank " + std::to_string(r1 * r2) +
                                        " exceeds cap " + std::to_string(rank_cap));
    up_to = std::min(up_to, r1 * r2);
    static std::mutex cache_lock;
    static std::map<std::tuple<int, int, int>, std::vector<MPoly>> cache;
    {
        std::lock_guard<std::mutex> lk(cache_lock);
        auto it = cache.find({r1, r2, up_to});
        if (it != cache.end()) return it->second;
    }
    std::vector<std::string> av, bv;
    for (int i = 1; i <= r1; ++i) av.push_back("a" + std::to_string(i));
    for (int j = 1; j <= r2; ++j) bv.push_back("b" + std::to_string(j));
    MPoly prod = MPoly::one();
    for (auto& a : av)
        for (auto& b : bv) {
            MPoly f = MPoly::one() - MPoly::var(a) - MPoly::var(b);
            prod = MPoly::mul(prod, f, up_to);
        }
    std::vector<std::string> lp, lq;
    for (int i = 1; i <= r1; ++i) lp.push_back("lp" + std::to_string(i));
    for (int j = 1; j <= r2; ++j) lq.push_back("lq" + std::to_string(j));
    std::vector<MPoly> out;
    for (int i = 1; i <= up_to; ++i) {
        MPoly piece = prod.graded_piece(i);
        MPoly ina = elementary_symmetric_rewrite(piece, av, lp);
        MPoly inb = elementary_symmetric_rewrite(ina, bv, lq);
        out.push_back(inb);
    }
    {
        std::lock_guard<std::mutex> lk(cache_lock);
        cache.emplace(std::tuple{r1, r2, up_to}, out);
    }
    return out;
}

namespace detail_excess {

inline std::string halfedge_psi_var(int e, int side) {
    return "p" + std::to_string(e) + (side == 0 ? "a" : "b");
}
inline std::string vertex_lambda_var(int v, int i) {
    return "L" + std::to_string(v) + "_" + std::to_string(i);
}

// Total Chern class of the pulled-back normal bundle on the stratum: product
// over color pairs and vertex pairs of c(E~_{g(v)} (x) E~_{g(w)}), expanded in
// per-vertex lambda classes, truncated at the cap.
inline MPoly normal_chern_on_stratum(const ColoredTree& t, int cap, int rank_cap = 49) {
    MPoly total = MPoly::one();
    for (int v = 0; v < t.n(); ++v) {
        for (int w = v + 1; w < t.n(); ++w) {
            if (t.genus[v] == 0 || t.genus[w] == 0) continue;
            if (t.color[v] == t.color[w]) continue;
            int r1 = t.genus[v], r2 = t.genus[w];
            auto cs = box_tensor_chern(r1, r2, cap, rank_cap);
            MPoly factor = MPoly::one();
            std::map<std::string, std::string> names;
            for (int i = 1; i <= r1; ++i) names["lp" + std::to_string(i)] = vertex_lambda_var(v, i);
            for (int j = 1; j <= r2; ++j) names["lq" + std::to_string(j)] = vertex_lambda_var(w, j);
            for (std::size_t i = 0; i < cs.size(); ++i) factor += cs[i].rename(names);
            total = MPoly::mul(total, factor, cap);
        }
    }
    return total;
}

}  // namespace detail_excess

// dim M_T^ct = sum_v (3 g(v) - 3 + n(v)).
inline int stratum_dim(const ColoredTree& t) {
    auto val = t.valences();
    int d = 0;
    for (int v = 0; v < t.n(); ++v) d += 3 * t.genus[v] - 3 + val[v];
    return d;
}

// Substitutes a universal contribution into tautological classes on the
// stratum: z_e -> -(psi'_e + psi''_e), C_i -> degree-i part of the box-tensor
// normal Chern class, truncated at dim M_T^ct; the resulting decorated-graph
// terms carry the coefficient 1/|Aut(T)|.
inline TautExpr substitute_contribution(const ColoredTree& t, const ContPoly& cont,
                                        const Partition& mu, int rank_cap = 49) {
    using namespace detail_excess;
    int d = mu.codim();
    // the substituted class is homogeneous of degree d - |E|, so cap there
    int cap = std::min(stratum_dim(t), d - t.m());
    if (cap < 0) {
        TautExpr out;
        out.g = mu.total();
        out.n = 0;
        return out;
    }
    MPoly chern = normal_chern_on_stratum(t, cap, rank_cap);
    std::map<std::string, MPoly> sub;
    for (int e = 0; e < t.m(); ++e) {
        sub[edge_var(e)] =
            -(MPoly::var(halfedge_psi_var(e, 0)) + MPoly::var(halfedge_psi_var(e, 1)));
    }
    for (int i = 1; i <= d; ++i) sub[chern_var(i)] = chern.graded_piece(i);
    MPoly poly = cont.expr.substitute(sub, cap);

    Rat aut = Rat(1) / Rat(automorphism_order(t));
    TautExpr out;
    out.g = mu.total();
    out.n = 0;
    auto val = t.valences();
    for (auto& [expo, coef] : poly.terms()) {
        DecoratedGraphTerm term;
        term.coeff = coef * aut;
        term.genus = t.genus;
        term.legs.assign(t.n(), {});
        term.lambda_dec.assign(t.n(), {});
        term.kappa_dec.assign(t.n(), {});
        for (auto& e : t.edges) term.edges.push_back(e);
        term.edge_psi.assign(t.m(), {0, 0});
        for (std::size_t vi = 0; vi < poly.vars().size(); ++vi) {
            if (expo[vi] == 0) continue;
            const std::string& name = poly.vars()[vi];
            if (name[0] == 'p') {
                int side = name.back() == 'a' ? 0 : 1;
                int e = std::stoi(name.substr(1, name.size() - 2));
                term.edge_psi[e][side] += expo[vi];
            } else if (name[0] == 'L') {
                auto us = name.find('_');
                int v = std::stoi(name.substr(1, us - 1));
                int i = std::stoi(name.substr(us + 1));
                term.lambda_dec[v][i] += expo[vi];
            } else {
                throw Error("Internal", "unexpected variable " + name + " after substitution");
            }
        }
        out.terms.push_back(std::move(term));
    }
    out.normalize();
    return out;
}

// True iff the Torelli pullback of the product cycle vanishes for degree
// reasons: cod_mu > 2g - 3.
inline bool vanishing_predicate(const Partition& mu) {
    return mu.codim() > 2 * mu.total() - 3;
}

// Full assembly of Tor^*([A_{g_1} x ... x A_{g_k}]) as a sum over all
// mu-colored extremal trees of substituted contributions. Contributions for
// trees with the same edge count are independent once all smaller trees are
// memoized, so each edge-count layer fans out across threads; the merged
// result is canonical regardless of thread count.
inline TautExpr torelli_pullback(const Partition& mu, int rank_cap = 49, int threads = 1) {
    TautExpr out;
    out.g = mu.total();
    out.n = 0;
    ContEngine engine(mu);
    auto trees = enumerate_trees(mu);
    if (threads <= 1) {
        for (auto& t : trees) {
            const ContPoly& cont = engine.contribution(t);
            TautExpr piece = substitute_contribution(t, cont, mu, rank_cap);
            out.terms.insert(out.terms.end(), piece.terms.begin(), piece.terms.end());
        }
        out.normalize();
        return out;
    }
    std::map<int, std::vector<const ColoredTree*>> layers;
    for (auto& t : trees) layers[t.m()].push_back(&t);
    std::vector<TautExpr> pieces(trees.size());
    std::size_t base = 0;
    for (auto& [m, layer] : layers) {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= layer.size()) break;
                const ColoredTree& t = *layer[i];
                const ContPoly& cont = engine.contribution(t);
                pieces[base + i] = substitute_contribution(t, cont, mu, rank_cap);
            }
        };
        std::vector<std::thread> pool;
        int nthreads = std::min<int>(threads, static_cast<int>(layer.size()));
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        base += layer.size();
    }
    for (auto& p : pieces)
        out.terms.insert(out.terms.end(), p.terms.begin(), p.terms.end());
    out.normalize();
    return out;
}

}  // namespace tautring
