#pragma once

#include <openssl/evp.h>

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tautring/lambda_ring.hpp"
#include "tautring/numbers.hpp"
#include "tautring/tautexpr.hpp"
#include "tautring/trees.hpp"
#include "tautring/version.hpp"

namespace tautring {

// ---------------------------------------------------------------------------
// Closed-form constants
// ---------------------------------------------------------------------------

struct TautProductFormula {
    Rat coeff;
    MPoly lambda_poly;  // in l1..l_{g} with deg l_i = i
};

// The closed tautological projections of the product cycles, as a scalar
// coefficient times a lambda polynomial.
inline TautProductFormula taut_product_formula(const Partition& mu) {
    int g = mu.total();
    std::vector<int> parts = mu.parts;
    std::sort(parts.begin(), parts.end());
    auto B = [](int n) { return bernoulli(n).abs(); };
    TautProductFormula out;
    if (parts.size() == 2 && parts[0] == 1) {
        out.coeff = Rat(g) / (Rat(6) * B(2 * g));
        out.lambda_poly = lambda_var(g - 1);
        return out;
    }
    if (parts.size() == 2 && parts[0] == 2) {
        out.coeff = Rat(1, 360) * Rat(g) * Rat(g - 1) / (B(2 * g) * B(2 * g - 2));
        out.lambda_poly = lambda_var(g - 1) * lambda_var(g - 3);
        return out;
    }
    if (parts.size() == 2 && parts[0] == 3) {
        out.coeff =
            Rat(1, 45360) * Rat(g) * Rat(g - 1) * Rat(g - 2) /
            (B(2 * g) * B(2 * g - 2) * B(2 * g - 4));
        out.lambda_poly =
            lambda_var(g - 1) * (lambda_var(g - 4) * lambda_var(g - 4) -
                                 lambda_var(g - 3) * lambda_var(g - 5));
        return out;
    }
    if (parts.size() == 3 && parts[0] == 1 && parts[1] == 1) {
        out.coeff = Rat(1, 36) * Rat(g) * Rat(g - 1) / (B(2 * g) * B(2 * g - 2));
        out.lambda_poly = lambda_var(g - 1) * lambda_var(g - 2);
        return out;
    }
    throw Error("UnknownConstant", "no stored projection formula for mu=(" + mu.str() + ")");
}

// Stored tautological projections of the Torelli cycle for g <= 8.
inline MPoly jg_table(int g) {
    auto L = [](int i) { return lambda_var(i); };
    switch (g) {
        case 2:
            return MPoly::one();
        case 3:
            return Rat(2) * MPoly::one();
        case 4:
            return Rat(16) * L(1);
        case 5:
            return Rat(144) * L(1) * L(2) - Rat(96) * L(3);
        case 6:
            return Rat(768) * L(1) * L(2) * L(3) - Rat(2304) * L(2) * L(4) +
                   Rat("948096/691") * L(1) * L(5);
        case 7:
            return Rat(1536) * L(1) * L(2) * L(3) * L(4) - Rat(13824) * L(2) * L(3) * L(5) +
                   Rat("4418304/691") * L(1) * L(4) * L(5) +
                   Rat("15044352/691") * L(1) * L(3) * L(6) - Rat("17685504/691") * L(4) * L(6);
        case 8:
            return Rat("500106387456/2499347") * L(2) * L(6) * L(7) -
                   Rat("311646117888/2499347") * L(3) * L(5) * L(7) -
                   Rat("203316609024/2499347") * L(1) * L(2) * L(5) * L(7) +
                   Rat("139564449792/2499347") * L(1) * L(3) * L(4) * L(7) -
                   Rat("14966784/691") * L(4) * L(5) * L(6) +
                   Rat("25731072/691") * L(1) * L(3) * L(5) * L(6) -
                   Rat("12533760/691") * L(2) * L(3) * L(4) * L(6) +
                   Rat("552960/691") * L(1) * L(2) * L(3) * L(4) * L(5);
        default:
            throw Error("OutOfRange", "stored Torelli projections cover 2 <= g <= 8");
    }
}

// Exact coefficient of lambda_{g-1} in the projected elliptic
// Noether-Lefschetz class: d^{2g-1} g/(6|B_{2g}|) prod_{p|d} (1 - p^{2-2g}).
inline Rat nl_projection_coeff(int g, long d) {
    if (g < 2 || d < 1) throw Error("OutOfRange", "need g >= 2 and d >= 1");
    mpz_class dp;
    mpz_ui_pow_ui(dp.get_mpz_t(), d, 2 * g - 1);
    Rat out = Rat(dp) * Rat(g) / (Rat(6) * bernoulli(2 * g).abs());
    for (long p : prime_divisors(d)) {
        mpz_class pp;
        mpz_ui_pow_ui(pp.get_mpz_t(), p, 2 * g - 2);
        out *= Rat(1) - Rat(1) / Rat(pp);
    }
    return out;
}

// Divisor-sum identity underlying the Eisenstein rewriting of the NL
// projections: sum_{e|d} sigma_1(d/e) e^{2g-1} prod_{p|e}(1 - p^{2-2g})
// equals sigma_{2g-1}(d).
inline bool eisenstein_identity_check(int g, long d_max) {
    if (g < 2) throw Error("OutOfRange", "need g >= 2");
    for (long d = 1; d <= d_max; ++d) {
        Rat lhs(0);
        for (long e = 1; e <= d; ++e) {
            if (d % e) continue;
            mpz_class ep;
            mpz_ui_pow_ui(ep.get_mpz_t(), e, 2 * g - 1);
            Rat term = Rat(sigma(1, d / e)) * Rat(ep);
            for (long p : prime_divisors(e)) {
                mpz_class pp;
                mpz_ui_pow_ui(pp.get_mpz_t(), p, 2 * g - 2);
                term *= Rat(1) - Rat(1) / Rat(pp);
            }
            lhs += term;
        }
        if (lhs != Rat(sigma(2 * g - 1, d))) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Abel-Jacobi pullbacks
// ---------------------------------------------------------------------------

// theta(v) = 1/2 sum v_i^2 psi_i - 1/4 sum_{h,S} v_S^2 delta_{h,S} on
// M^{ct}_{g,n}; both delta_{h,S} and delta_{g-h,S^c} appear in the sum and
// identical divisor terms are merged by the TautExpr normal form. Divisors
// failing stability on either side are dropped as zero.
inline TautExpr theta_pullback(const std::vector<long>& v, int g) {
    int n = static_cast<int>(v.size());
    if (n < 1) throw Error("OutOfRange", "need n >= 1");
    TautExpr out;
    out.g = g;
    out.n = n;
    for (int i = 0; i < n; ++i) {
        if (v[i] == 0) continue;
        DecoratedGraphTerm t;
        t.coeff = Rat(v[i]) * Rat(v[i]) / Rat(2);
        t.genus = {g};
        t.legs = {{}};
        for (int m = 1; m <= n; ++m) t.legs[0].push_back(m);
        t.lambda_dec.assign(1, {});
        t.kappa_dec.assign(1, {});
        t.marking_psi[i + 1] = 1;
        out.terms.push_back(std::move(t));
    }
    for (int h = 0; h <= g; ++h) {
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            long vS = 0;
            int sz = 0;
            for (int i = 0; i < n; ++i)
                if (mask >> i & 1) { vS += v[i]; ++sz; }
            if (vS == 0) continue;
            // stability of both sides
            if (2 * h - 2 + sz + 1 <= 0) continue;
            if (2 * (g - h) - 2 + (n - sz) + 1 <= 0) continue;
            DecoratedGraphTerm t;
            t.coeff = -Rat(vS) * Rat(vS) / Rat(4);
            t.genus = {h, g - h};
            t.legs.assign(2, {});
            for (int i = 0; i < n; ++i) t.legs[mask >> i & 1 ? 0 : 1].push_back(i + 1);
            t.edges.push_back({0, 1});
            t.edge_psi.push_back({0, 0});
            t.lambda_dec.assign(2, {});
            t.kappa_dec.assign(2, {});
            out.terms.push_back(std::move(t));
        }
    }
    out.normalize();
    return out;
}

// Pullback of eta_{ij} along the Abel-Jacobi map of an integer matrix with
// zero row sums: theta(a_i + a_j) - theta(a_i) - theta(a_j).
inline TautExpr eta_pullback(const std::vector<std::vector<long>>& A, int i, int j, int g) {
    int s = static_cast<int>(A.size());
    if (i < 1 || j < 1 || i > s || j > s || i == j)
        throw Error("BadMatrix", "need 1 <= i < j <= s");
    for (auto& row : A) {
        long sum = 0;
        for (long x : row) sum += x;
        if (sum != 0) throw Error("BadMatrix", "matrix rows must sum to zero");
        if (row.size() != A[0].size()) throw Error("BadMatrix", "ragged matrix");
    }
    std::vector<long> sum(A[0].size());
    for (std::size_t t = 0; t < sum.size(); ++t) sum[t] = A[i - 1][t] + A[j - 1][t];
    TautExpr out = theta_pullback(sum, g);
    out += theta_pullback(A[i - 1], g).scaled(Rat(-1));
    out += theta_pullback(A[j - 1], g).scaled(Rat(-1));
    return out;
}

// ---------------------------------------------------------------------------
// Script generation
// ---------------------------------------------------------------------------

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

// Canonical serialization of a TautExpr (also the JSON interchange format).
inline std::string tautexpr_json(const TautExpr& x);

namespace detail_emit {

inline std::string frac(const Rat& r) {
    return "Fraction(" + r.num().get_str() + ", " + r.den().get_str() + ")";
}

// Python expression for the tautclass of one decorated term (without the
// rational coefficient). Vertices receive leg lists: markings first, then
// half-edge labels n+1, n+2, ... in edge order.
inline std::string term_expr(const DecoratedGraphTerm& t, int /*g*/, int n) {
    int nv = t.n_vertices();
    // assign half-edge labels
    std::vector<std::array<int, 2>> hlabels(t.edges.size());
    int next = n + 1;
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
        hlabels[e][0] = next++;
        hlabels[e][1] = next++;
    }
    std::vector<std::vector<int>> legs(nv);
    for (int v = 0; v < nv; ++v)
        for (int m : t.legs[v]) legs[v].push_back(m);
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
        legs[t.edges[e][0]].push_back(hlabels[e][0]);
        legs[t.edges[e][1]].push_back(hlabels[e][1]);
    }
    // per-vertex psi powers keyed by position in the leg list
    auto vertex_class = [&](int v) {
        int nvv = static_cast<int>(legs[v].size());
        std::string gv = std::to_string(t.genus[v]);
        std::string nvstr = std::to_string(nvv);
        std::vector<std::string> factors;
        for (auto& [li, p] : t.lambda_dec[v])
            for (int q = 0; q < p; ++q)
                factors.push_back("lambdaclass(" + std::to_string(li) + ", " + gv + ", " + nvstr +
                                  ")");
        for (auto& [ki, p] : t.kappa_dec[v])
            for (int q = 0; q < p; ++q)
                factors.push_back("kappaclass(" + std::to_string(ki) + ", " + gv + ", " + nvstr +
                                  ")");
        for (int pos = 0; pos < nvv; ++pos) {
            int lab = legs[v][pos];
            int power = 0;
            if (lab <= n) {
                auto it = t.marking_psi.find(lab);
                if (it != t.marking_psi.end()) power = it->second;
            } else {
                for (std::size_t e = 0; e < t.edges.size(); ++e) {
                    if (hlabels[e][0] == lab) power = t.edge_psi[e][0];
                    if (hlabels[e][1] == lab) power = t.edge_psi[e][1];
                }
            }
            for (int q = 0; q < power; ++q)
                factors.push_back("psiclass(" + std::to_string(pos + 1) + ", " + gv + ", " +
                                  nvstr + ")");
        }
        if (factors.empty()) return std::string("fundclass(") + gv + ", " + nvstr + ")";
        std::string out = factors[0];
        for (std::size_t i = 1; i < factors.size(); ++i) out += " * " + factors[i];
        return out;
    };

    if (t.edges.empty()) {
        // ambient term
        return vertex_class(0);
    }
    std::ostringstream os;
    os << "StableGraph([";
    for (int v = 0; v < nv; ++v) os << (v ? ", " : "") << t.genus[v];
    os << "], [";
    for (int v = 0; v < nv; ++v) {
        os << (v ? ", " : "") << "[";
        for (std::size_t i = 0; i < legs[v].size(); ++i) os << (i ? ", " : "") << legs[v][i];
        os << "]";
    }
    os << "], [";
    for (std::size_t e = 0; e < t.edges.size(); ++e)
        os << (e ? ", " : "") << "(" << hlabels[e][0] << ", " << hlabels[e][1] << ")";
    os << "]).boundary_pushforward([";
    for (int v = 0; v < nv; ++v) os << (v ? ", " : "") << vertex_class(v);
    os << "])";
    return os.str();
}

}  // namespace detail_emit

// Deterministic external-calculator script constructing the expression and,
// optionally, comparing it against a closed-form lambda polynomial target of
// the same codimension. Dialect "v1" targets admcycles.
inline std::string emit_script(const TautExpr& x, const std::string& dialect = "v1",
                               const std::string& compare_lambda_expr = "",
                               const std::string& compare_comment = "") {
    if (dialect != "v1") throw Error("UnsupportedDialect", "unknown dialect " + dialect);
    std::vector<std::pair<std::string, const DecoratedGraphTerm*>> ordered;
    for (auto& t : x.terms) ordered.emplace_back(t.canonical_key(), &t);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::ostringstream os;
    os << "# generated-by: tautring " << kVersion << " input-sha256:" << sha256_hex(tautexpr_json(x))
       << "\n";
    os << "# Decorated boundary strata on Mbar_{" << x.g << "," << x.n
       << "}; intended comparisons live in the compact-type quotient.\n";
    os << "from admcycles import StableGraph, psiclass, lambdaclass, kappaclass, fundclass\n";
    os << "from fractions import Fraction\n\n";
    os << "g, n = " << x.g << ", " << x.n << "\n\n";
    if (ordered.empty()) {
        os << "total = 0 * fundclass(g, n)  # the zero class\n";
    } else {
        os << "terms = []\n";
        for (auto& [key, t] : ordered) {
            os << "terms.append(" << detail_emit::frac(t->coeff) << " * "
               << detail_emit::term_expr(*t, x.g, x.n) << ")\n";
        }
        os << "\ntotal = sum(terms[1:], terms[0])\n";
    }
    os << "print(total)\n";
    if (!compare_lambda_expr.empty()) {
        int codim = x.terms.empty() ? 0 : x.terms[0].codim();
        os << "\n# " << compare_comment << "\n";
        os << "target = " << compare_lambda_expr << "\n";
        os << "diff = total - target\n";
        os << "print('difference in the compact-type basis:')\n";
        os << "print(diff.toTautbasis(g, n, " << codim << ", moduli='ct'))\n";
    }
    return os.str();
}

// Script computing the Abel-Jacobi pullback of the projected generalized
// product locus for s = 1 and checking that the difference against the
// geometric side pairs to zero under the lambda_g pairing.
inline std::string delta_emit(int g, int s = 1) {
    if (s != 1) throw Error("OutOfRange", "only s = 1 is emitted in this version");
    if (g < 2) throw Error("OutOfRange", "need g >= 2");
    // aj^* theta for the pairing matrix B = (1, -1).
    TautExpr ajtheta = theta_pullback({1, -1}, g);
    Rat pref = Rat(1) / (Rat(6) * bernoulli(2 * g).abs());  // g/(6 kappa_{g,1} |B_2g|), kappa = g
    int compl_deg = g - 1;                                  // 2g - 3 + n - g with n = 2

    std::ostringstream os;
    os << "# generated-by: tautring " << kVersion << " input-sha256:"
       << sha256_hex(tautexpr_json(ajtheta) + "|delta|" + std::to_string(g)) << "\n";
    os << "# Kernel-membership check for the lambda_g pairing on Mbar_{" << g << ",2}:\n";
    os << "# pulled-back projected product locus vs. the geometric pairing data.\n";
    os << "from admcycles import StableGraph, psiclass, lambdaclass, kappaclass, fundclass, "
          "tautgens\n";
    os << "from fractions import Fraction\n\n";
    os << "g, n = " << g << ", 2\n\n";
    os << "# aj^* theta with difference divisor conventions baked in\n";
    {
        std::vector<std::pair<std::string, const DecoratedGraphTerm*>> ordered;
        for (auto& t : ajtheta.terms) ordered.emplace_back(t.canonical_key(), &t);
        std::sort(ordered.begin(), ordered.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        os << "aj_theta_terms = []\n";
        for (auto& [key, t] : ordered)
            os << "aj_theta_terms.append(" << detail_emit::frac(t->coeff) << " * "
               << detail_emit::term_expr(*t, g, 2) << ")\n";
        os << "aj_theta = sum(aj_theta_terms[1:], aj_theta_terms[0])\n\n";
    }
    os << "# pullback of the projected locus: prefactor * aj_theta * lambda_{g-1}\n";
    os << "taut_side = " << detail_emit::frac(pref) << " * aj_theta * lambdaclass(" << (g - 1)
       << ", g, n)\n\n";
    os << "# geometric side of the pairing: the pulled-back locus pairs like\n";
    os << "# (1/(12|B_2g|)) (psi_1 + psi_2) lambda_{g-1} under multiplication by lambda_g\n";
    os << "geom_pairing = " << detail_emit::frac(pref / Rat(2))
       << " * (psiclass(1, g, n) + psiclass(2, g, n)) * lambdaclass(" << (g - 1) << ", g, n)\n\n";
    os << "lam_g = lambdaclass(" << g << ", g, n)\n";
    os << "ok = True\n";
    os << "for beta in tautgens(g, n, " << compl_deg << "):\n";
    os << "    lhs = (geom_pairing * lam_g * beta).evaluate()\n";
    os << "    rhs = (taut_side * lam_g * beta).evaluate()\n";
    os << "    if lhs != rhs:\n";
    os << "        ok = False\n";
    os << "        print('PAIRING MISMATCH', lhs, rhs)\n";
    os << "print('kernel membership:', 'PASS' if ok else 'FAIL')\n";
    if (g == 2) {
        os << "# For g = 2 the kernel in this degree is trivial, so the difference class\n";
        os << "# itself is expected to vanish.\n";
    }
    return os.str();
}

inline std::string tautexpr_json(const TautExpr& x) {
    std::ostringstream os;
    os << "{\"g\":" << x.g << ",\"n\":" << x.n << ",\"terms\":[";
    std::vector<std::pair<std::string, const DecoratedGraphTerm*>> ordered;
    for (auto& t : x.terms) ordered.emplace_back(t.canonical_key(), &t);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    bool firstT = true;
    for (auto& [key, tp] : ordered) {
        const auto& t = *tp;
        if (!firstT) os << ",";
        firstT = false;
        os << "{\"coeff\":\"" << t.coeff.str() << "\",\"genus\":[";
        for (int v = 0; v < t.n_vertices(); ++v) os << (v ? "," : "") << t.genus[v];
        os << "],\"legs\":[";
        for (int v = 0; v < t.n_vertices(); ++v) {
            os << (v ? "," : "") << "[";
            for (std::size_t i = 0; i < t.legs[v].size(); ++i)
                os << (i ? "," : "") << t.legs[v][i];
            os << "]";
        }
        os << "],\"edges\":[";
        for (std::size_t e = 0; e < t.edges.size(); ++e)
            os << (e ? "," : "") << "[" << t.edges[e][0] << "," << t.edges[e][1] << "]";
        os << "],\"edge_psi\":[";
        for (std::size_t e = 0; e < t.edge_psi.size(); ++e)
            os << (e ? "," : "") << "[" << t.edge_psi[e][0] << "," << t.edge_psi[e][1] << "]";
        os << "],\"lambda\":[";
        for (int v = 0; v < t.n_vertices(); ++v) {
            os << (v ? "," : "") << "[";
            bool f = true;
            for (auto& [i, p] : t.lambda_dec[v]) {
                os << (f ? "" : ",") << "[" << i << "," << p << "]";
                f = false;
            }
            os << "]";
        }
        os << "],\"kappa\":[";
        for (int v = 0; v < t.n_vertices(); ++v) {
            os << (v ? "," : "") << "[";
            bool f = true;
            for (auto& [i, p] : t.kappa_dec[v]) {
                os << (f ? "" : ",") << "[" << i << "," << p << "]";
                f = false;
            }
            os << "]";
        }
        os << "],\"marking_psi\":[";
        bool f = true;
        for (auto& [i, p] : t.marking_psi) {
            os << (f ? "" : ",") << "[" << i << "," << p << "]";
            f = false;
        }
        os << "]}";
    }
    os << "]}";
    return os.str();
}

}  // namespace tautring
