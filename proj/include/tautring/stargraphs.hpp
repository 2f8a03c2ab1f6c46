#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tautring/mpoly.hpp"

namespace tautring {

// Rooted wall-crossing graph: a root with genus label g0 and legs carrying
// (genus, multiplicity partition).
struct StarGraph {
    struct Leg {
        int h;
        std::vector<int> mu;
        friend bool operator<(const Leg& a, const Leg& b) {
            return std::pair(a.h, a.mu) < std::pair(b.h, b.mu);
        }
        friend bool operator==(const Leg& a, const Leg& b) { return a.h == b.h && a.mu == b.mu; }
    };
    int r = 0;
    int g0 = 0;
    std::vector<Leg> legs;

    int m() const { return static_cast<int>(legs.size()); }

    // g = sum_i (g_i + len(mu^i)) + g0 - m.
    int glued_genus() const {
        int g = g0 - m();
        for (auto& l : legs) g += l.h + static_cast<int>(l.mu.size());
        return g;
    }
};

// |Aut| of the multiset of (genus, partition) pairs.
inline long long aut_order_star(const StarGraph& S) {
    std::map<std::pair<int, std::vector<int>>, int> counts;
    for (auto& l : S.legs) counts[{l.h, l.mu}]++;
    long long a = 1;
    for (auto& [key, c] : counts)
        for (int i = 2; i <= c; ++i) a *= i;
    return a;
}

namespace detail_stars {

// partitions of n in descending-lex order, parts descending within each.
inline std::vector<std::vector<int>> partitions_desc(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int rem, int mx) {
        if (rem == 0) {
            out.push_back(cur);
            return;
        }
        for (int x = std::min(rem, mx); x >= 1; --x) {
            cur.push_back(x);
            rec(rem - x, x);
            cur.pop_back();
        }
    };
    rec(n, n);
    return out;
}

}  // namespace detail_stars

// Star-graph catalog for the wall-crossing sum.
//
// r=1: the root is the elliptic mapping curve (g0 = 1) and every leg carries
// multiplicity (1); leg genera form a partition of g-1.
//
// r=2: either the root is a smooth genus-2 mapping curve (g0 = 2, all legs
// (1), genera a partition of g-2), or the domain is the disconnected pair of
// elliptic curves (g0 = 1) with exactly one (1,1)-leg of genus h >= 1 bridging
// the two components and g-2-h further legs (1,(1)). This reproduces the
// published catalogs (4 graphs at g=4, 6 at g=5).
inline std::vector<StarGraph> enumerate_stars(int g, int r) {
    if (r != 1 && r != 2) throw Error("UnsupportedR", "only r = 1, 2 are treated");
    if (g < r + 1) throw Error("OutOfRange", "need g >= r + 1");
    std::vector<StarGraph> out;
    if (r == 1) {
        for (auto& p : detail_stars::partitions_desc(g - 1)) {
            StarGraph S;
            S.r = 1;
            S.g0 = 1;
            for (int h : p) S.legs.push_back({h, {1}});
            out.push_back(std::move(S));
        }
        return out;
    }
    // family (a): connected genus-2 root
    for (auto& p : detail_stars::partitions_desc(g - 2)) {
        StarGraph S;
        S.r = 2;
        S.g0 = 2;
        for (int h : p) S.legs.push_back({h, {1}});
        out.push_back(std::move(S));
    }
    // family (b): disconnected root, one (1,1)-bridge of genus h, genus-1 tails
    for (int h = g - 2; h >= 1; --h) {
        StarGraph S;
        S.r = 2;
        S.g0 = 1;
        S.legs.push_back({h, {1, 1}});
        for (int i = 0; i < g - 2 - h; ++i) S.legs.push_back({1, {1}});
        out.push_back(std::move(S));
    }
    return out;
}

// True when the wall-crossing term of the graph involves exceptional classes:
// for the genus-2 root every Psi substitution carries E_i; for the
// disconnected root only the (1,1)-leg's Psi_1 does, and only when the
// z-degree forces a substitution (h >= 2) and the blowup is nontrivial
// (at least two (1)-markings).
inline bool star_has_exceptional(const StarGraph& S) {
    if (S.r != 2) return false;
    if (S.g0 == 2) return true;
    int h11 = 0, ones = 0;
    for (auto& l : S.legs) {
        if (l.mu.size() == 2) h11 = l.h;
        else ++ones;
    }
    return h11 >= 2 && ones >= 2;
}

// z-degree of the I-function: r*h - len(mu).
inline int z_degree(int h, const std::vector<int>& mu, int r) {
    return r * h - static_cast<int>(mu.size());
}

// Truncated wall-crossing series attached to a leg:
// I_{h,mu}(z) = (1/|Aut mu|) [ prod_j Lambda~(z - alpha_j) /
//                              prod_k (z - psi_k - H_k) ]_{z >= 0},
// with Lambda~(t) = sum_i c_i(E~_h) t^{h-i} and c_i(E~) = (-1)^i lambda_i.
// Coefficients are exact polynomials in lam_i, psi_k, H_k, alpha_j.
struct IFunctionSeries {
    int h = 0;
    std::vector<int> mu;
    int r = 0;
    std::vector<MPoly> coeffs;  // coeffs[j] = coefficient of z^j; empty if zero

    int top_power() const { return static_cast<int>(coeffs.size()) - 1; }
};

inline IFunctionSeries i_function(int h, const std::vector<int>& mu, int r,
                                  int floor_margin = 4) {
    if (h < 0 || mu.empty() || (r != 1 && r != 2))
        throw Error("OutOfRange", "bad I-function parameters");
    int ell = static_cast<int>(mu.size());
    int top = r * h - ell;
    IFunctionSeries out;
    out.h = h;
    out.mu = mu;
    out.r = r;
    if (top < 0) return out;

    // numerator coefficients N_p of z^p
    std::vector<MPoly> lam = {MPoly::one()};
    for (int i = 1; i <= h; ++i) lam.push_back(MPoly::var("lam" + std::to_string(i), i));
    std::vector<MPoly> num(r * h + 1);  // N_p
    // build prod_j Lambda~(z - alpha_j) iteratively as polynomial in z
    std::vector<MPoly> poly = {MPoly::one()};  // poly[p] = coeff of z^p
    for (int j = 1; j <= r; ++j) {
        MPoly alpha = MPoly::var("alpha" + std::to_string(j));
        // Lambda~(z - alpha) = sum_{i=0}^{h} (-1)^i lam_i (z - alpha)^{h-i}
        std::vector<MPoly> factor(h + 1);
        for (int i = 0; i <= h; ++i) {
            // expand (z - alpha)^{h-i}
            int e = h - i;
            for (int p = 0; p <= e; ++p) {
                // z^p coefficient: C(e,p) (-alpha)^{e-p}
                MPoly c = Rat(binomial(e, p)) * (-alpha).pow(e - p);
                factor[p] += Rat(i % 2 ? -1 : 1) * lam[i] * c;
            }
        }
        std::vector<MPoly> next(poly.size() + h);
        for (std::size_t p = 0; p < poly.size(); ++p)
            for (int q = 0; q <= h; ++q) next[p + q] += poly[p] * factor[q];
        poly = std::move(next);
    }
    for (std::size_t p = 0; p < poly.size() && p < num.size(); ++p) num[p] = poly[p];

    // denominator expansion: 1/prod(z - w_k) = sum_{q >= ell} h_{q-ell}(w) z^{-q}
    std::vector<MPoly> w;
    for (int k = 1; k <= ell; ++k)
        w.push_back(MPoly::var("psi" + std::to_string(k)) + MPoly::var("H" + std::to_string(k)));
    int depth = r * h + floor_margin;  // highest q needed is r*h
    // complete homogeneous polynomials h_t(w)
    std::vector<MPoly> hk(depth + 1);
    hk[0] = MPoly::one();
    // h_t = sum over multisets; build by iterating geometric series per w_k
    {
        std::vector<MPoly> acc(depth + 1);
        acc[0] = MPoly::one();
        for (auto& wk : w) {
            std::vector<MPoly> next(depth + 1);
            for (int a = 0; a <= depth; ++a) {
                if (acc[a].is_zero()) continue;
                MPoly p = MPoly::one();
                for (int t = 0; a + t <= depth; ++t) {
                    next[a + t] += acc[a] * p;
                    p = p * wk;
                }
            }
            acc = std::move(next);
        }
        hk = std::move(acc);
    }

    out.coeffs.assign(top + 1, MPoly());
    for (int j = 0; j <= top; ++j) {
        MPoly c;
        for (int q = ell; j + q <= r * h; ++q) c += num[j + q] * hk[q - ell];
        out.coeffs[j] = c;
    }
    // 1/|Aut(mu)| prefactor
    std::map<int, int> mult;
    for (int part : mu) mult[part]++;
    Rat aut(1);
    for (auto& [part, cnt] : mult) aut *= Rat(factorial(cnt));
    for (auto& c : out.coeffs) c = c * (Rat(1) / aut);
    return out;
}

// Number of irreducible components of the blowup center Z_1 u ... u Z_k:
// (3^k - 2^k - 1)/2 + 1.
inline mpz_class blowup_component_count(int k) {
    if (k < 1) throw Error("OutOfRange", "need k >= 1");
    mpz_class p3, p2;
    mpz_ui_pow_ui(p3.get_mpz_t(), 3, k);
    mpz_ui_pow_ui(p2.get_mpz_t(), 2, k);
    return (p3 - p2 - 1) / 2 + 1;
}

// Exceptional-pushforward tables for the iterated blowups with k <= 3
// markings, stored verbatim. The result is a signed combination of opaque
// stratum symbols; psi_q1, psi_q2 are the classes at the two bridge nodes.
enum class BlowupCase { M21, M22, M23 };

struct SymbolicClass {
    std::map<std::string, Rat> coeffs;  // symbol -> coefficient
    std::map<std::string, int> degree;  // symbol -> codimension

    void add(const std::string& sym, const Rat& c, int deg) {
        coeffs[sym] += c;
        degree[sym] = deg;
        if (coeffs[sym].is_zero()) {
            coeffs.erase(sym);
            degree.erase(sym);
        }
    }

    bool is_zero() const { return coeffs.empty(); }

    std::string str() const {
        if (coeffs.empty()) return "0";
        std::string s;
        bool first = true;
        for (auto& [sym, c] : coeffs) {
            if (!first) s += " + ";
            if (c == Rat(1)) s += sym;
            else if (c == Rat(-1)) s += "-" + sym;
            else s += c.str() + "*" + sym;
            first = false;
        }
        return s;
    }
};

inline SymbolicClass exceptional_pushforward(BlowupCase cse, const std::map<int, int>& monomial) {
    for (auto& [i, p] : monomial)
        if (p < 0 || i < 1) throw Error("OutOfTable", "bad exceptional monomial");
    auto power = [&](int i) {
        auto it = monomial.find(i);
        return it == monomial.end() ? 0 : it->second;
    };
    int total = 0;
    for (auto& [i, p] : monomial) total += p;
    SymbolicClass out;
    if (cse == BlowupCase::M21) {
        for (auto& [i, p] : monomial)
            if (i != 1 && p > 0) throw Error("OutOfTable", "only E_1 exists for one marking");
        if (total == 0) throw Error("OutOfTable", "empty monomial");
        if (power(1) == 2) out.add("Z{1}", Rat(-1), 2);
        return out;  // tau_*(E_1^l) = 0 for l != 2
    }
    if (cse == BlowupCase::M22) {
        for (auto& [i, p] : monomial)
            if (i > 2 && p > 0) throw Error("OutOfTable", "only E_1, E_2 exist");
        int a = power(1), b = power(2);
        if (a + b == 0) throw Error("OutOfTable", "empty monomial");
        if (b > 1 || a > 3) {
            // allow the symmetric lookup E_2-heavy by swapping labels
            throw Error("OutOfTable", "monomial outside the tabulated degree bounds");
        }
        if (a == 1 && b == 0) return out;                       // tau(E_i) = 0
        if (a == 0 && b == 1) return out;
        if (a == 1 && b == 1) { out.add("Z{1,2}", Rat(-1), 2); return out; }
        if (a == 2 && b == 0) {
            out.add("Z{1}", Rat(-1), 2);
            out.add("Z{1,2}", Rat(-1), 2);
            return out;
        }
        if ((a == 2 && b == 1) || (a == 3 && b == 0)) {
            out.add("psi_q1|Z{1}", Rat(-1), 3);
            out.add("psi_q1|Z{1,2}", Rat(1), 3);
            out.add("psi_q2|Z{1,2}", Rat(1), 3);
            return out;
        }
        if (a == 3 && b == 1) return out;  // tau(E_1^3 E_2) = 0
        throw Error("OutOfTable", "monomial outside the tabulated degree bounds");
    }
    // M23: at most first powers of each E_i
    for (auto& [i, p] : monomial) {
        if (i > 3 && p > 0) throw Error("OutOfTable", "only E_1..E_3 exist");
        if (p > 1) throw Error("OutOfTable", "powers above 1 are not tabulated for k=3");
    }
    std::vector<int> present;
    for (int i = 1; i <= 3; ++i)
        if (power(i) == 1) present.push_back(i);
    if (present.empty()) throw Error("OutOfTable", "empty monomial");
    if (present.size() == 1) return out;  // tau(E_i) = 0
    if (present.size() == 2) {
        out.add("Z{" + std::to_string(present[0]) + "," + std::to_string(present[1]) + "}",
                Rat(-1), 2);
        out.add("Z{1,2,3}", Rat(-1), 2);
        return out;
    }
    out.add("psi_q1|Z{1,2}", Rat(-1), 3);
    out.add("psi_q1|Z{1,3}", Rat(-1), 3);
    out.add("psi_q1|Z{2,3}", Rat(-1), 3);
    out.add("psi_q1|Z{1,2,3}", Rat(1), 3);
    out.add("psi_q2|Z{1,2,3}", Rat(1), 3);
    return out;
}

// One assembled wall-crossing term: the unramified-space symbol, the inverse
// automorphism factor, the leg I-functions, and the substitution rules that
// express Psi, H, alpha on the blowup models.
struct WallTerm {
    StarGraph graph;
    Rat aut_inverse;
    std::string space;
    bool exceptional = false;
    std::vector<IFunctionSeries> leg_series;
    std::vector<std::string> psi_rules;
};

inline std::vector<WallTerm> wallcross_assemble(int g, int r) {
    if (r != 1 && r != 2) throw Error("UnsupportedR", "only r = 1, 2 are treated");
    if (r == 2 && g > 5)
        throw Error("MissingTable",
                    "exceptional pushforwards are tabulated only for k <= 3 markings (g <= 5)");
    std::vector<WallTerm> out;
    for (auto& S : enumerate_stars(g, r)) {
        WallTerm term;
        term.graph = S;
        term.aut_inverse = Rat(1) / Rat(aut_order_star(S));
        term.exceptional = star_has_exceptional(S);
        int k = 0;
        for (auto& l : S.legs)
            if (l.mu.size() == 1) ++k;
        if (r == 1) {
            term.space = "M^{ct,un}_1(pi_1;(1)^" + std::to_string(k) + ") ~ M^{ct}_{1," +
                         std::to_string(k) + "}";
            for (int i = 1; i <= S.m(); ++i)
                term.psi_rules.push_back("Psi_" + std::to_string(i) + " = psi_" +
                                         std::to_string(i));
        } else if (S.g0 == 2) {
            term.space = "M^{ct,un}_2(pi_2;(1)^" + std::to_string(k) + ") ~ Bl M^{ct}_{2," +
                         std::to_string(k) + "}";
            for (int i = 1; i <= S.m(); ++i) {
                term.psi_rules.push_back("Psi_" + std::to_string(i) + " = psi_" +
                                         std::to_string(i) + " - eps_" + std::to_string(i) +
                                         "^*psi_1 + E_" + std::to_string(i));
                term.psi_rules.push_back("ev_" + std::to_string(i) + "^*H = eps_" +
                                         std::to_string(i) + "^*psi_1 - E_" + std::to_string(i));
            }
            term.psi_rules.push_back("ev^*alpha_j = alpha_j");
        } else {
            term.space = "M^{ct,un}_1(pi_2;(1,1),(1)^" + std::to_string(k) +
                         ")^bullet ~ Bl M^bullet_{1,2+" + std::to_string(k) + "}";
            term.psi_rules.push_back("Psi_1 = psi_{p1} + psi_{p2} - E");
            for (int i = 1; i <= k; ++i)
                term.psi_rules.push_back("Psi_" + std::to_string(1 + i) + " = psi_" +
                                         std::to_string(i));
            term.psi_rules.push_back("ev^*H = 0");
            term.psi_rules.push_back("alpha_j = 0");
        }
        for (auto& l : S.legs) term.leg_series.push_back(i_function(l.h, l.mu, r));
        out.push_back(std::move(term));
    }
    return out;
}

}  // namespace tautring
