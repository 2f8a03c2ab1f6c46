#pragma once

#include <algorithm>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "tautring/rational.hpp"

namespace tautring {

// Exact multivariate polynomial over named, weighted variables.
//
// Each polynomial carries its own variable dictionary; exponent vectors are
// dense with length = number of variables. Weights give the grading (all
// weights are 1 unless a variable is declared otherwise, e.g. deg lambda_i = i,
// deg c_i(N) = i). No zero coefficients are stored.
class MPoly {
public:
    using Expo = std::vector<int>;

    MPoly() = default;

    explicit MPoly(std::vector<std::string> vars, std::vector<int> weights = {})
        : vars_(std::move(vars)), weights_(std::move(weights)) {
        if (weights_.empty()) weights_.assign(vars_.size(), 1);
        if (weights_.size() != vars_.size())
            throw Error("BadDictionary", "weights/vars size mismatch");
    }

    static MPoly constant(const Rat& c) {
        MPoly p;
        if (!c.is_zero()) p.terms_[{}] = c;
        return p;
    }
    static MPoly zero() { return MPoly(); }
    static MPoly one() { return constant(Rat(1)); }

    static MPoly var(const std::string& name, int weight = 1, int power = 1) {
        MPoly p({name}, {weight});
        p.terms_[{power}] = Rat(1);
        return p;
    }

    const std::vector<std::string>& vars() const { return vars_; }
    const std::vector<int>& weights() const { return weights_; }
    const std::map<Expo, Rat>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    int var_index(const std::string& name) const {
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i] == name) return static_cast<int>(i);
        return -1;
    }

    Rat constant_term() const {
        Expo z(vars_.size(), 0);
        auto it = terms_.find(z);
        return it == terms_.end() ? Rat(0) : it->second;
    }

    int weighted_degree(const Expo& e) const {
        int d = 0;
        for (std::size_t i = 0; i < e.size(); ++i) d += e[i] * weights_[i];
        return d;
    }

    int degree() const {
        int d = 0;
        for (auto& [e, c] : terms_) d = std::max(d, weighted_degree(e));
        return d;
    }

    void add_term(const Expo& e, const Rat& c) {
        if (e.size() != vars_.size()) throw Error("BadExponent", "exponent length mismatch");
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    MPoly operator-() const {
        MPoly r(*this);
        for (auto& [e, c] : r.terms_) c = -c;
        return r;
    }

    friend MPoly operator+(const MPoly& a, const MPoly& b) {
        auto [ra, rb] = aligned(a, b);
        for (auto& [e, c] : rb.terms_) ra.add_term(e, c);
        return ra;
    }
    friend MPoly operator-(const MPoly& a, const MPoly& b) { return a + (-b); }

    friend MPoly operator*(const MPoly& a, const Rat& s) {
        MPoly r(a);
        if (s.is_zero()) return MPoly(a.vars_, a.weights_);
        for (auto& [e, c] : r.terms_) c *= s;
        return r;
    }
    friend MPoly operator*(const Rat& s, const MPoly& a) { return a * s; }

    friend MPoly operator*(const MPoly& a, const MPoly& b) { return mul(a, b, -1); }

    MPoly& operator+=(const MPoly& o) {
        if (vars_ == o.vars_) {
            for (auto& [e, c] : o.terms_) add_term(e, c);
            return *this;
        }
        *this = *this + o;
        return *this;
    }
    MPoly& operator-=(const MPoly& o) {
        if (vars_ == o.vars_) {
            for (auto& [e, c] : o.terms_) add_term(e, -c);
            return *this;
        }
        *this = *this - o;
        return *this;
    }
    MPoly& operator*=(const MPoly& o) { *this = *this * o; return *this; }

    friend bool operator==(const MPoly& a, const MPoly& b) { return (a - b).is_zero(); }
    friend bool operator!=(const MPoly& a, const MPoly& b) { return !(a == b); }

    // Product truncated to weighted degree <= cap (cap < 0 means no cap).
    static MPoly mul(const MPoly& a, const MPoly& b, int cap) {
        auto [ra, rb] = aligned(a, b);
        MPoly out(ra.vars_, ra.weights_);
        for (auto& [ea, ca] : ra.terms_) {
            int da = out.weighted_degree(ea);
            for (auto& [eb, cb] : rb.terms_) {
                if (cap >= 0 && da + out.weighted_degree(eb) > cap) continue;
                Expo e(ea);
                for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
                out.add_term(e, ca * cb);
            }
        }
        return out;
    }

    MPoly pow(unsigned n, int cap = -1) const {
        MPoly r = MPoly::one();
        MPoly b = *this;
        while (n) {
            if (n & 1) r = mul(r, b, cap);
            b = mul(b, b, cap);
            n >>= 1;
        }
        return r;
    }

    // Sum of terms of weighted degree <= d.
    MPoly truncate_leq(int d) const {
        MPoly r(vars_, weights_);
        for (auto& [e, c] : terms_)
            if (weighted_degree(e) <= d) r.terms_.emplace(e, c);
        return r;
    }

    // The homogeneous piece of weighted degree exactly d.
    MPoly graded_piece(int d) const {
        MPoly r(vars_, weights_);
        for (auto& [e, c] : terms_)
            if (weighted_degree(e) == d) r.terms_.emplace(e, c);
        return r;
    }

    bool is_homogeneous() const {
        int d = -1;
        for (auto& [e, c] : terms_) {
            int w = weighted_degree(e);
            if (d < 0) d = w;
            else if (w != d) return false;
        }
        return true;
    }

    // q with (*this) * q == 1 modulo weighted degree > d. Requires constant term 1.
    MPoly series_inverse(int d) const {
        if (!(constant_term() == Rat(1)))
            throw Error("NonUnit", "series inverse requires constant term 1");
        MPoly h = MPoly::constant(Rat(1)) - *this;  // degree >= 1 part, negated
        h = h.truncate_leq(d);
        MPoly acc = MPoly::one();
        MPoly powh = MPoly::one();
        for (int k = 1; k <= d; ++k) {
            powh = mul(powh, h, d);
            if (powh.is_zero()) break;
            acc += powh;
        }
        return acc.truncate_leq(d);
    }

    // Partial derivative with respect to a variable.
    MPoly derivative(const std::string& name) const {
        int i = var_index(name);
        MPoly r(vars_, weights_);
        if (i < 0) return r;
        for (auto& [e, c] : terms_) {
            if (e[i] == 0) continue;
            Expo f(e);
            f[i] -= 1;
            r.add_term(f, c * Rat(e[i]));
        }
        return r;
    }

    // Substitutes variables by polynomials; unlisted variables stay themselves.
    MPoly substitute(const std::map<std::string, MPoly>& repl, int cap = -1) const {
        // Power cache per replaced variable.
        std::vector<int> idx;
        std::vector<std::vector<MPoly>> pows;  // pows[j][k] = repl^k
        std::vector<const MPoly*> base;
        for (auto& [name, p] : repl) {
            int i = var_index(name);
            if (i < 0) continue;
            idx.push_back(i);
            base.push_back(&p);
            pows.push_back({MPoly::one()});
        }
        // accumulate over a fixed union dictionary to avoid re-alignment
        MPoly acc(vars_, weights_);
        for (auto& [name, p] : repl) {
            auto [a, b] = aligned(acc, p);
            acc = MPoly(a.vars(), a.weights());
        }
        MPoly out = acc;
        for (auto& [e, c] : terms_) {
            MPoly t = MPoly::constant(c);
            Expo rem(e);
            for (std::size_t j = 0; j < idx.size(); ++j) {
                int k = e[idx[j]];
                rem[idx[j]] = 0;
                if (k == 0) continue;
                while (static_cast<int>(pows[j].size()) <= k)
                    pows[j].push_back(mul(pows[j].back(), *base[j], cap));
                t = mul(t, pows[j][k], cap);
            }
            MPoly mono(vars_, weights_);
            mono.add_term(rem, Rat(1));
            t = mul(t, mono, cap);
            out += t.remapped(out.vars(), out.weights());
        }
        if (cap >= 0) out = out.truncate_leq(cap);
        return out;
    }

    // Exact division by the monomial prod var_i^e_i; throws NotDivisible.
    MPoly divide_by_monomial(const std::map<std::string, int>& mono) const {
        std::vector<std::pair<int, int>> div;  // (var index, power)
        for (auto& [name, p] : mono) {
            if (p == 0) continue;
            int i = var_index(name);
            if (i < 0) throw Error("NotDivisible", "variable " + name + " absent");
            div.emplace_back(i, p);
        }
        MPoly r(vars_, weights_);
        for (auto& [e, c] : terms_) {
            Expo f(e);
            for (auto& [i, p] : div) {
                if (f[i] < p)
                    throw Error("NotDivisible", "term not divisible by monomial");
                f[i] -= p;
            }
            r.terms_.emplace(f, c);
        }
        return r;
    }

    // Extracts the coefficient (an MPoly in the remaining variables) of
    // var^power, for a single variable.
    MPoly coefficient_of(const std::string& name, int power) const {
        int i = var_index(name);
        MPoly r(vars_, weights_);
        if (i < 0) {
            if (power == 0) return *this;
            return r;
        }
        for (auto& [e, c] : terms_) {
            if (e[i] != power) continue;
            Expo f(e);
            f[i] = 0;
            r.terms_.emplace(f, c);
        }
        return r;
    }

    // Coefficient of a full monomial given as {var: power} over this
    // polynomial's variables (variables not listed must have exponent 0).
    Rat coefficient(const std::map<std::string, int>& mono) const {
        Expo e(vars_.size(), 0);
        for (auto& [name, p] : mono) {
            int i = var_index(name);
            if (i < 0) {
                if (p != 0) return Rat(0);
                continue;
            }
            e[i] = p;
        }
        auto it = terms_.find(e);
        return it == terms_.end() ? Rat(0) : it->second;
    }

    // Renames variables (dictionary map old -> new); weights are kept.
    MPoly rename(const std::map<std::string, std::string>& names) const {
        MPoly r(*this);
        for (auto& v : r.vars_) {
            auto it = names.find(v);
            if (it != names.end()) v = it->second;
        }
        return r;
    }

    // Canonical text rendering: terms sorted by graded-lex monomial order
    // (weighted degree descending, then exponents lexicographically
    // descending), coefficients as "p/q".
    std::string str() const {
        if (terms_.empty()) return "0";
        std::vector<std::pair<Expo, Rat>> ts(terms_.begin(), terms_.end());
        std::sort(ts.begin(), ts.end(), [&](const auto& a, const auto& b) {
            int da = weighted_degree(a.first), db = weighted_degree(b.first);
            if (da != db) return da > db;
            return a.first > b.first;
        });
        std::string out;
        bool first = true;
        for (auto& [e, c] : ts) {
            Rat a = c;
            if (first) {
                if (a.sign() < 0) { out += "-"; a = -a; }
            } else {
                out += a.sign() < 0 ? " - " : " + ";
                if (a.sign() < 0) a = -a;
            }
            first = false;
            std::string mono;
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                if (!mono.empty()) mono += "*";
                mono += vars_[i];
                if (e[i] != 1) mono += "^" + std::to_string(e[i]);
            }
            if (mono.empty()) out += a.str();
            else if (a.is_one()) out += mono;
            else out += a.str() + "*" + mono;
        }
        return out;
    }

    friend std::ostream& operator<<(std::ostream& os, const MPoly& p) { return os << p.str(); }

    // Returns copies of a and b over the merged dictionary.
    static std::pair<MPoly, MPoly> aligned(const MPoly& a, const MPoly& b) {
        if (a.vars_ == b.vars_) return {a, b};
        std::vector<std::string> vars = a.vars_;
        std::vector<int> weights = a.weights_;
        for (std::size_t i = 0; i < b.vars_.size(); ++i) {
            bool found = false;
            for (std::size_t j = 0; j < vars.size(); ++j) {
                if (vars[j] == b.vars_[i]) {
                    if (weights[j] != b.weights_[i])
                        throw Error("BadDictionary",
                                    "conflicting weights for variable " + b.vars_[i]);
                    found = true;
                    break;
                }
            }
            if (!found) {
                vars.push_back(b.vars_[i]);
                weights.push_back(b.weights_[i]);
            }
        }
        return {a.remapped(vars, weights), b.remapped(vars, weights)};
    }

    MPoly remapped(const std::vector<std::string>& vars, const std::vector<int>& weights) const {
        MPoly r(vars, weights);
        std::vector<int> where(vars_.size(), -1);
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            for (std::size_t j = 0; j < vars.size(); ++j)
                if (vars[j] == vars_[i]) { where[i] = static_cast<int>(j); break; }
            if (where[i] < 0) throw Error("BadDictionary", "remap misses variable " + vars_[i]);
        }
        for (auto& [e, c] : terms_) {
            Expo f(vars.size(), 0);
            for (std::size_t i = 0; i < e.size(); ++i) f[where[i]] = e[i];
            r.add_term(f, c);
        }
        return r;
    }

private:
    std::vector<std::string> vars_;
    std::vector<int> weights_;
    std::map<Expo, Rat> terms_;
};

// Builds prod_{i}(1 + x_i) over the given degree-1 variables.
inline MPoly product_one_plus(const std::vector<std::string>& names) {
    MPoly p = MPoly::one();
    for (auto& n : names) p = p * (MPoly::one() + MPoly::var(n));
    return p;
}

// Rewrites a polynomial that is symmetric in the given root variables in
// terms of elementary symmetric polynomials e_1..e_r of those roots (variable
// names supplied by enames, weight of e_i equal to i). Other variables pass
// through untouched. Throws NotSymmetric if the input is not invariant under
// some adjacent transposition of the roots.
MPoly elementary_symmetric_rewrite(const MPoly& p, const std::vector<std::string>& roots,
                                   const std::vector<std::string>& enames);

namespace detail {

inline MPoly swap_vars(const MPoly& p, const std::string& a, const std::string& b) {
    return p.rename({{a, b}, {b, a}});
}

// Expands e_k(roots) as an explicit polynomial.
inline MPoly elementary_symmetric_poly(const std::vector<std::string>& roots, int k) {
    int r = static_cast<int>(roots.size());
    MPoly out(roots, std::vector<int>(roots.size(), 1));
    if (k == 0) return MPoly::one();
    if (k > r) return out;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        MPoly::Expo e(roots.size(), 0);
        for (int i : idx) e[i] = 1;
        out.add_term(e, Rat(1));
        int i = k - 1;
        while (i >= 0 && idx[i] == r - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

}  // namespace detail

inline MPoly elementary_symmetric_rewrite(const MPoly& p, const std::vector<std::string>& roots,
                                          const std::vector<std::string>& enames) {
    if (enames.size() != roots.size()) throw Error("BadDictionary", "enames size mismatch");
    for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
        if (detail::swap_vars(p, roots[i], roots[i + 1]) != p)
            throw Error("NotSymmetric", "not invariant under transposition (" + roots[i] + " " +
                                            roots[i + 1] + ")");
    }
    int r = static_cast<int>(roots.size());
    std::vector<int> rootIdx(roots.size());
    // Work over the merged dictionary containing the roots.
    MPoly work = p;
    for (auto& name : roots)
        if (work.var_index(name) < 0) {
            auto [w, dummy] = MPoly::aligned(work, MPoly::var(name));
            work = w;
        }
    for (int i = 0; i < r; ++i) rootIdx[i] = work.var_index(roots[i]);

    std::vector<MPoly> evalue;  // e_k expanded, aligned lazily
    evalue.reserve(r + 1);
    for (int k = 0; k <= r; ++k) evalue.push_back(detail::elementary_symmetric_poly(roots, k));

    std::vector<int> eweights(r);
    for (int k = 0; k < r; ++k) eweights[k] = k + 1;
    MPoly result(enames, eweights);

    while (!work.is_zero()) {
        // Leading term with respect to the root variables: pick the term whose
        // root-exponent tuple is lexicographically maximal; for a symmetric
        // polynomial it is weakly decreasing.
        const MPoly::Expo* best = nullptr;
        const Rat* bestC = nullptr;
        std::vector<int> bestKey;
        for (auto& [e, c] : work.terms()) {
            std::vector<int> key(r, 0);
            for (int i = 0; i < r; ++i) key[i] = e[rootIdx[i]];
            if (!best || key > bestKey || (key == bestKey && e > *best)) {
                best = &e;
                bestC = &c;
                bestKey = key;
            }
        }
        std::vector<int> lambda = bestKey;
        for (int i = 0; i + 1 < r; ++i)
            if (lambda[i] < lambda[i + 1])
                throw Error("NotSymmetric", "leading root exponent not a partition");
        // e-monomial with matching leading term: prod e_i^(lambda_i - lambda_{i+1}).
        MPoly emono = MPoly::one();
        MPoly expansion = MPoly::one();
        for (int i = 0; i < r; ++i) {
            int next = (i + 1 < r) ? lambda[i + 1] : 0;
            int pw = lambda[i] - next;
            if (pw == 0) continue;
            emono = emono * MPoly::var(enames[i], i + 1, pw);
            expansion = expansion * evalue[i + 1].pow(pw);
        }
        // Passthrough part of the leading term (non-root variables).
        MPoly::Expo rest(*best);
        for (int i = 0; i < r; ++i) rest[rootIdx[i]] = 0;
        MPoly passth(work.vars(), work.weights());
        passth.add_term(rest, *bestC);

        result += MPoly::mul(emono, passth.rename({}), -1);
        work -= MPoly::mul(expansion, passth, -1);
    }
    return result;
}

}  // namespace tautring
