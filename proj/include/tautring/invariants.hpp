#pragma once

#include <map>
#include <set>
#include <mutex>
#include <string>
#include <vector>

#include "tautring/linalg.hpp"
#include "tautring/mpoly.hpp"
#include "tautring/numbers.hpp"

namespace tautring {

// Unordered pair {i,j}, 1 <= i <= j <= s, with the eta_{ii} = theta_i
// convention. Variables are named t<i> and e<i><j>.
struct Sym2Index {
    int i, j;  // i <= j
    Sym2Index(int a, int b) : i(std::min(a, b)), j(std::max(a, b)) {}
    bool diagonal() const { return i == j; }
    std::string var_name() const {
        if (diagonal()) return "t" + std::to_string(i);
        return "e" + std::to_string(i) + std::to_string(j);
    }
    std::string m_name() const { return "m" + std::to_string(i) + std::to_string(j); }
    friend bool operator<(const Sym2Index& a, const Sym2Index& b) {
        return std::pair(a.i, a.j) < std::pair(b.i, b.j);
    }
    friend bool operator==(const Sym2Index& a, const Sym2Index& b) {
        return a.i == b.i && a.j == b.j;
    }
};

inline std::vector<Sym2Index> sym2_indices(int s) {
    std::vector<Sym2Index> out;
    for (int i = 1; i <= s; ++i) out.emplace_back(i, i);
    for (int i = 1; i <= s; ++i)
        for (int j = i + 1; j <= s; ++j) out.emplace_back(i, j);
    return out;
}

// kappa_{g,s} = prod_{k=0}^{s-1} (g + k/2).
inline Rat kappa_constant(int g, int s) {
    Rat r(1);
    for (int k = 0; k < s; ++k) r *= Rat(2 * g + k, 2);
    return r;
}

// Element of the invariant ring in the theta/eta generators (all degree 1).
struct InvClass {
    int g = 0, s = 0;
    MPoly expr;
};

// The invariant ring I_{g,s} with integration, relation reduction and the
// Gorenstein pairing. Degrees run 0..gs.
class InvRing {
public:
    static constexpr int kDefaultGenusCap = 6;
    static constexpr int kDefaultFoldCap = 4;

    InvRing(int g, int s, int genus_cap = kDefaultGenusCap, int fold_cap = kDefaultFoldCap)
        : g_(g), s_(s) {
        if (g < 1 || s < 1) throw Error("OutOfRange", "need g >= 1 and s >= 1");
        if (g > genus_cap || s > fold_cap)
            throw Error("OutOfRange", "(g,s) exceeds the configured caps");
        idx_ = sym2_indices(s);
        for (auto& I : idx_) {
            var_names_.push_back(I.var_name());
            m_names_.push_back(I.m_name());
        }
    }

    int genus() const { return g_; }
    int folds() const { return s_; }
    int socle_degree() const { return g_ * s_; }
    const std::vector<Sym2Index>& indices() const { return idx_; }
    const std::vector<std::string>& var_names() const { return var_names_; }

    MPoly var(const Sym2Index& I) const { return MPoly::var(I.var_name()); }

    // det of the symmetric formal matrix (m_ij).
    MPoly det_matrix() const {
        std::vector<int> perm(s_);
        for (int i = 0; i < s_; ++i) perm[i] = i;
        MPoly out(m_names_, std::vector<int>(m_names_.size(), 1));
        do {
            int sign = perm_sign(perm);
            MPoly term = MPoly::one();
            for (int i = 0; i < s_; ++i)
                term = term * MPoly::var(Sym2Index(i + 1, perm[i] + 1).m_name());
            out += Rat(sign) * term;
        } while (std::next_permutation(perm.begin(), perm.end()));
        return out;
    }

    const MPoly& det_power(int p) const {
        std::lock_guard<std::mutex> lk(lock_);
        auto it = detpow_.find(p);
        if (it != detpow_.end()) return it->second;
        MPoly d = det_matrix().pow(p);
        return detpow_.emplace(p, std::move(d)).first->second;
    }

    // integral of a monomial eta^a (no factorial normalization):
    // a! * [m^a] det(M)^g.
    Rat integrate_monomial(const std::map<Sym2Index, int>& a) const {
        Rat fact(1);
        std::map<std::string, int> mexp;
        int deg = 0;
        for (auto& [I, p] : a) {
            fact *= Rat(factorial(p));
            mexp[I.m_name()] = p;
            deg += p;
        }
        if (deg != socle_degree()) throw Error("WrongDegree", "integrand not of degree g*s");
        return fact * det_power(g_).coefficient(mexp);
    }

    // integral of a general class of degree gs.
    Rat integrate(const InvClass& x) const {
        if (x.expr.is_zero()) return Rat(0);
        if (!(x.expr == x.expr.graded_piece(socle_degree())))
            throw Error("WrongDegree", "integrand not homogeneous of degree g*s");
        Rat out(0);
        MPoly e = x.expr.remapped(var_names_, std::vector<int>(var_names_.size(), 1));
        for (auto& [expo, c] : e.terms()) {
            std::map<Sym2Index, int> a;
            for (std::size_t i = 0; i < idx_.size(); ++i)
                if (expo[i]) a[idx_[i]] = expo[i];
            out += c * integrate_monomial(a);
        }
        return out;
    }

    // Relation generators: the coefficients of the monomials in the formal
    // a-variables of (sum_i a_i^2 t_i + sum_{i<j} a_i a_j e_ij)^{g+1}.
    const std::vector<MPoly>& relation_generators() const {
        std::lock_guard<std::mutex> lk(lock_);
        if (!gens_.empty()) return gens_;
        std::vector<std::string> avars;
        for (int i = 1; i <= s_; ++i) avars.push_back("a" + std::to_string(i));
        MPoly form;
        for (auto& I : idx_) {
            MPoly av = MPoly::var("a" + std::to_string(I.i)) * MPoly::var("a" + std::to_string(I.j));
            form += av * MPoly::var(I.var_name());
        }
        MPoly power = form.pow(g_ + 1);
        // collect by a-monomial, keeping only the theta/eta part
        std::map<std::vector<int>, MPoly> buckets;
        const auto& vars = power.vars();
        std::vector<int> apos(avars.size(), -1);
        for (std::size_t i = 0; i < avars.size(); ++i)
            for (std::size_t j = 0; j < vars.size(); ++j)
                if (vars[j] == avars[i]) apos[i] = static_cast<int>(j);
        std::vector<int> tepos(var_names_.size(), -1);
        for (std::size_t i = 0; i < var_names_.size(); ++i)
            for (std::size_t j = 0; j < vars.size(); ++j)
                if (vars[j] == var_names_[i]) tepos[i] = static_cast<int>(j);
        std::vector<int> ones(var_names_.size(), 1);
        for (auto& [expo, c] : power.terms()) {
            std::vector<int> akey(avars.size(), 0);
            for (std::size_t i = 0; i < avars.size(); ++i)
                if (apos[i] >= 0) akey[i] = expo[apos[i]];
            MPoly::Expo tees(var_names_.size(), 0);
            for (std::size_t i = 0; i < var_names_.size(); ++i)
                if (tepos[i] >= 0) tees[i] = expo[tepos[i]];
            auto [it, inserted] = buckets.emplace(akey, MPoly(var_names_, ones));
            it->second.add_term(tees, c);
        }
        for (auto& [akey, p] : buckets) gens_.push_back(p);
        return gens_;
    }

    // Spanning set of the degree-'degree' piece of the relation ideal:
    // generators times monomials of degree (degree - g - 1).
    std::vector<MPoly> relation_basis(int degree) const {
        std::vector<MPoly> out;
        if (degree < g_ + 1) return out;
        for (auto& gen : relation_generators()) {
            for (auto& m : monomials(degree - g_ - 1)) {
                MPoly mono(var_names_, std::vector<int>(var_names_.size(), 1));
                mono.add_term(m, Rat(1));
                out.push_back(mono * gen);
            }
        }
        return out;
    }

    // All exponent vectors of total degree k over the s(s+1)/2 generators.
    const std::vector<MPoly::Expo>& monomials(int k) const {
        std::lock_guard<std::mutex> lk(lock_);
        auto it = monos_.find(k);
        if (it != monos_.end()) return it->second;
        std::vector<MPoly::Expo> out;
        MPoly::Expo cur(idx_.size(), 0);
        rec_monomials(k, static_cast<int>(idx_.size()), cur, out);
        return monos_.emplace(k, std::move(out)).first->second;
    }

    // Monomial basis of the degree-k piece of the quotient, as exponent
    // vectors. Uses a mod-p pivot search certified exactly against the
    // integration pairing; falls back to exact elimination if certification
    // fails.
    const std::vector<MPoly::Expo>& basis(int k) const {
        degree_data(k);
        std::lock_guard<std::mutex> lk(lock_);
        return degdata_.at(k).basis;
    }

    int dim(int k) const { return static_cast<int>(basis(k).size()); }

    // Normal form of a homogeneous degree-k class in the chosen basis; exact.
    std::vector<Rat> normal_form(const InvClass& x, int k) const {
        if (!(x.expr == x.expr.graded_piece(k)))
            throw Error("WrongDegree", "input not homogeneous of the requested degree");
        exact_echelon(k);
        const auto& pos = mono_positions(k);
        std::lock_guard<std::mutex> lk(lock_);
        auto& dd = degdata_.at(k);
        MPoly e = x.expr.remapped(var_names_, std::vector<int>(var_names_.size(), 1));
        SparseRow row;
        for (auto& [expo, c] : e.terms()) row.emplace_back(pos.at(expo), c);
        row = dd.exact_ech.reduce(std::move(row));
        std::vector<Rat> coords(dd.basis.size(), Rat(0));
        for (auto& [col, v] : row) {
            auto bit = dd.basis_index.find(col);
            if (bit == dd.basis_index.end())
                throw Error("Internal", "reduction left a pivot monomial");
            coords[bit->second] = v;
        }
        return coords;
    }

    // Pairing of the degree-k basis against the degree-(gs-k) basis via the
    // integral.
    QMatrix gram_matrix(int k) const {
        int kc = socle_degree() - k;
        if (k < 0 || kc < 0) throw Error("WrongDegree", "gram degree out of range");
        auto& bk = basis(k);
        auto& bc = basis(kc);
        QMatrix M(bk.size(), bc.size());
        for (std::size_t i = 0; i < bk.size(); ++i)
            for (std::size_t j = 0; j < bc.size(); ++j)
                M.at(i, j) = pair_monomials(bk[i], bc[j]);
        return M;
    }

    Rat pair_monomials(const MPoly::Expo& a, const MPoly::Expo& b) const {
        std::map<Sym2Index, int> sum;
        for (std::size_t i = 0; i < idx_.size(); ++i)
            if (a[i] + b[i]) sum[idx_[i]] = a[i] + b[i];
        return integrate_monomial(sum);
    }

    MPoly monomial_poly(const MPoly::Expo& e) const {
        MPoly p(var_names_, std::vector<int>(var_names_.size(), 1));
        p.add_term(e, Rat(1));
        return p;
    }

private:
    struct DegreeData {
        std::vector<MPoly::Expo> basis;
        std::map<std::size_t, std::size_t> basis_index;  // column -> basis position
        std::vector<std::size_t> pivots;
        bool have_exact = false;
        EchelonBasis exact_ech;
    };

    static int perm_sign(const std::vector<int>& p) {
        int sgn = 1;
        for (std::size_t i = 0; i < p.size(); ++i)
            for (std::size_t j = i + 1; j < p.size(); ++j)
                if (p[i] > p[j]) sgn = -sgn;
        return sgn;
    }

    void rec_monomials(int rem, int nvars, MPoly::Expo& cur,
                       std::vector<MPoly::Expo>& out) const {
        if (nvars == 0) {
            if (rem == 0) out.push_back(cur);
            return;
        }
        for (int e = 0; e <= rem; ++e) {
            cur[nvars - 1] = e;
            rec_monomials(rem - e, nvars - 1, cur, out);
        }
        cur[nvars - 1] = 0;
    }

    const std::map<MPoly::Expo, std::size_t>& mono_positions(int k) const {
        const auto& ms = monomials(k);
        std::lock_guard<std::mutex> lk(lock_);
        auto it = mono_pos_.find(k);
        if (it != mono_pos_.end()) return it->second;
        std::map<MPoly::Expo, std::size_t> pos;
        for (std::size_t i = 0; i < ms.size(); ++i) pos[ms[i]] = i;
        return mono_pos_.emplace(k, std::move(pos)).first->second;
    }

    // Sparse relation rows at degree k (generators times monomials).
    std::vector<SparseRow> relation_rows(int k) const {
        std::vector<SparseRow> rows;
        if (k < g_ + 1) return rows;
        const auto& pos = mono_positions(k);
        const auto& gens = relation_generators();
        const auto& shifts = monomials(k - g_ - 1);
        for (auto& gen : gens) {
            for (auto& sh : shifts) {
                SparseRow row;
                for (auto& [expo, c] : gen.terms()) {
                    MPoly::Expo e(expo);
                    for (std::size_t i = 0; i < e.size(); ++i) e[i] += sh[i];
                    row.emplace_back(pos.at(e), c);
                }
                std::sort(row.begin(), row.end(),
                          [](const auto& x, const auto& y) { return x.first < y.first; });
                rows.push_back(std::move(row));
            }
        }
        return rows;
    }

    void degree_data(int k) const {
        {
            std::lock_guard<std::mutex> lk(lock_);
            if (degdata_.count(k)) return;
        }
        DegreeData dd;
        const auto& ms = monomials(k);
        auto rows = relation_rows(k);
        int kc = socle_degree() - k;
        bool certified = false;
        if (kc >= 0) {
            static const std::uint64_t primes[] = {2305843009213693951ULL, 999999999999999989ULL};
            for (std::uint64_t p : primes) {
                ModpEchelon mp(p);
                bool bad = false;
                for (auto& r : rows) {
                    ModpEchelon::Row mr;
                    for (auto& [c, v] : r) {
                        if (v.den() % p == 0) { bad = true; break; }
                        std::uint64_t num = mpz_fdiv_ui(v.num().get_mpz_t(), p);
                        std::uint64_t den = mpz_fdiv_ui(v.den().get_mpz_t(), p);
                        std::uint64_t val = mp.mulmod(num, modinv(den, mp));
                        if (val) mr.emplace_back(c, val);
                    }
                    if (bad) break;
                    mp.insert(std::move(mr));
                }
                if (bad) continue;
                // Exact rank of the raw monomial pairing matrix; the smaller
                // side is the complementary degree when k is past the middle.
                std::size_t pairRank = pairing_rank(k);
                if (mp.rank() + pairRank == ms.size()) {
                    dd.pivots = mp.pivot_columns();
                    certified = true;
                    break;
                }
            }
        }
        if (!certified) {
            // exact elimination fallback
            EchelonBasis ech;
            for (auto& r : rows) ech.insert(r);
            for (auto& [c, row] : ech.rows()) dd.pivots.push_back(c);
            dd.exact_ech = ech;
            dd.have_exact = true;
        }
        std::set<std::size_t> pivset(dd.pivots.begin(), dd.pivots.end());
        for (std::size_t i = 0; i < ms.size(); ++i) {
            if (pivset.count(i)) continue;
            dd.basis_index[i] = dd.basis.size();
            dd.basis.push_back(ms[i]);
        }
        std::lock_guard<std::mutex> lk(lock_);
        degdata_.emplace(k, std::move(dd));
    }

    void exact_echelon(int k) const {
        degree_data(k);
        {
            std::lock_guard<std::mutex> lk(lock_);
            if (degdata_.at(k).have_exact) return;
        }
        EchelonBasis ech;
        for (auto& r : relation_rows(k)) ech.insert(r);
        std::lock_guard<std::mutex> lk(lock_);
        auto& dd = degdata_.at(k);
        if (dd.have_exact) return;
        // Cross-check: the exact pivot count must match the certified one.
        if (ech.rank() != dd.pivots.size())
            throw Error("Internal", "certified rank disagrees with exact elimination");
        dd.exact_ech = std::move(ech);
        dd.have_exact = true;
    }

    // Exact rank of the pairing matrix between all monomials of degree k and
    // all monomials of degree gs-k.
    std::size_t pairing_rank(int k) const {
        {
            std::lock_guard<std::mutex> lk(lock_);
            auto it = pairrank_.find(k);
            if (it != pairrank_.end()) return it->second;
        }
        int kc = socle_degree() - k;
        const auto& rowsM = monomials(k);
        const auto& colsM = monomials(kc);
        QMatrix M(rowsM.size(), colsM.size());
        for (std::size_t i = 0; i < rowsM.size(); ++i)
            for (std::size_t j = 0; j < colsM.size(); ++j)
                M.at(i, j) = pair_monomials(rowsM[i], colsM[j]);
        std::size_t r = M.rank();
        std::lock_guard<std::mutex> lk(lock_);
        pairrank_.emplace(k, r);
        pairrank_.emplace(kc, r);
        return r;
    }

    static std::uint64_t modinv(std::uint64_t a, const ModpEchelon& mp) {
        // Fermat inverse via the echelon's mulmod.
        std::uint64_t e = mp.p() - 2, r = 1, b = a % mp.p();
        while (e) {
            if (e & 1) r = mp.mulmod(r, b);
            b = mp.mulmod(b, b);
            e >>= 1;
        }
        return r;
    }

    int g_, s_;
    std::vector<Sym2Index> idx_;
    std::vector<std::string> var_names_, m_names_;
    mutable std::mutex lock_;
    mutable std::map<int, MPoly> detpow_;
    mutable std::vector<MPoly> gens_;
    mutable std::map<int, std::vector<MPoly::Expo>> monos_;
    mutable std::map<int, std::map<MPoly::Expo, std::size_t>> mono_pos_;
    mutable std::map<int, DegreeData> degdata_;
    mutable std::map<int, std::size_t> pairrank_;
};

// Symbolic Capelli identity check: det(d_ij) det(M)^g == kappa_{g,s}
// det(M)^{g-1}, with d_ij = 2^(delta_ij - 1) d/dm_ij.
inline bool capelli_check(int g, int s) {
    InvRing R(g, s);
    const MPoly& dg = R.det_power(g);
    std::vector<int> perm(s);
    for (int i = 0; i < s; ++i) perm[i] = i;
    MPoly acc;
    do {
        int sgn = 1;
        for (int i = 0; i < s; ++i)
            for (int j = i + 1; j < s; ++j)
                if (perm[i] > perm[j]) sgn = -sgn;
        MPoly term = dg;
        Rat scale(1);
        for (int i = 0; i < s; ++i) {
            Sym2Index I(i + 1, perm[i] + 1);
            term = term.derivative(I.m_name());
            if (!I.diagonal()) scale *= Rat(1, 2);
        }
        acc += Rat(sgn) * scale * term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return acc == kappa_constant(g, s) * R.det_power(g - 1);
}

// Closed-form projection: (1/kappa_{g,s}) * det of the matrix with diagonal
// theta_i and off-diagonal eta_ij / 2.
inline InvClass project_pr_formula(int g, int s) {
    InvRing R(g, s);
    std::vector<int> perm(s);
    for (int i = 0; i < s; ++i) perm[i] = i;
    MPoly det;
    do {
        int sgn = 1;
        for (int i = 0; i < s; ++i)
            for (int j = i + 1; j < s; ++j)
                if (perm[i] > perm[j]) sgn = -sgn;
        MPoly term = MPoly::one();
        Rat scale(1);
        for (int i = 0; i < s; ++i) {
            Sym2Index I(i + 1, perm[i] + 1);
            term = term * MPoly::var(I.var_name());
            if (!I.diagonal()) scale *= Rat(1, 2);
        }
        det += Rat(sgn) * scale * term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    InvClass out;
    out.g = g;
    out.s = s;
    out.expr = det * (Rat(1) / kappa_constant(g, s));
    return out;
}

// The r-fold generalization: det(...)^r / (kappa_{g,s} ... kappa_{g-r+1,s}).
inline InvClass pr_general_r(int g, int s, int r) {
    if (r < 1 || r > g - 1) throw Error("OutOfRange", "need 1 <= r <= g-1");
    InvClass base = project_pr_formula(g, s);
    MPoly det = base.expr * kappa_constant(g, s);
    Rat denom(1);
    for (int t = 0; t < r; ++t) denom *= kappa_constant(g - t, s);
    InvClass out;
    out.g = g;
    out.s = s;
    out.expr = det.pow(r) * (Rat(1) / denom);
    return out;
}

// Linear-solve route: the unique degree-s class rho with
// int rho * eta^a / a! = [m^a] det(M)^{g-1} for all a of degree gs - s.
inline InvClass project_pr_solve(int g, int s) {
    InvRing R(g, s);
    int k = s, kc = g * s - s;
    auto& B = R.basis(k);
    auto& Bc = R.basis(kc);
    if (B.size() != Bc.size())
        throw Error("SingularSystem", "basis dimensions disagree across the pairing");
    QMatrix A(Bc.size(), B.size());
    std::vector<Rat> rhs(Bc.size());
    const MPoly& dg1 = R.det_power(g - 1);
    for (std::size_t r = 0; r < Bc.size(); ++r) {
        Rat afact(1);
        std::map<std::string, int> mexp;
        for (std::size_t i = 0; i < R.indices().size(); ++i) {
            if (!Bc[r][i]) continue;
            afact *= Rat(factorial(Bc[r][i]));
            mexp[R.indices()[i].m_name()] = Bc[r][i];
        }
        for (std::size_t cidx = 0; cidx < B.size(); ++cidx)
            A.at(r, cidx) = R.pair_monomials(B[cidx], Bc[r]) / afact;
        rhs[r] = dg1.coefficient(mexp);
    }
    auto sol = solve_linear(A, rhs);
    if (sol.kind != LinearSolution::Unique)
        throw Error("SingularSystem", "projection system is not uniquely solvable");
    InvClass out;
    out.g = g;
    out.s = s;
    out.expr = MPoly();
    for (std::size_t i = 0; i < B.size(); ++i)
        out.expr += sol.x[i] * R.monomial_poly(B[i]);
    return out;
}

// Theorem-10 style projection on the universal family: the pair of the
// vertical determinant class with its scalar prefactor and the horizontal
// lambda_{g-1} factor.
struct Theorem10Result {
    Rat prefactor;    // g / (6 kappa_{g,s} |B_2g|)
    InvClass vertical;  // determinant class (no prefactor)
    int lambda_index; // g - 1
};

inline Theorem10Result theorem10(int g, int s) {
    if (g < 2) throw Error("OutOfRange", "need g >= 2");
    Theorem10Result out;
    out.prefactor = Rat(g) / (Rat(6) * kappa_constant(g, s) * bernoulli(2 * g).abs());
    if (s >= 1) {
        InvClass det = project_pr_formula(g, s);
        det.expr = det.expr * kappa_constant(g, s);  // plain determinant
        out.vertical = det;
    } else {
        out.vertical = InvClass{g, 0, MPoly::one()};
        out.prefactor = Rat(g) / (Rat(6) * bernoulli(2 * g).abs());
    }
    out.lambda_index = g - 1;
    return out;
}

// iota_k embedding of Sym^{2k} into Sym^k(Sym^2), mapped into theta/eta
// variables via e_ii -> t_i, e_ij -> e_ij / 2. Used to cross-validate the
// relation generators.
inline std::vector<MPoly> iota_embedding_images(int g, int s) {
    int k = g + 1;
    // nondecreasing strings of length 2k over {1..s}
    std::vector<std::vector<int>> strings;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int len, int minv) {
        if (len == 2 * k) {
            strings.push_back(cur);
            return;
        }
        for (int v = minv; v <= s; ++v) {
            cur.push_back(v);
            rec(len + 1, v);
            cur.pop_back();
        }
    };
    rec(0, 1);
    std::vector<MPoly> out;
    for (auto& I : strings) {
        // sum over perfect pairings of the string
        MPoly acc;
        std::function<void(std::vector<int>&, MPoly)> pair = [&](std::vector<int>& rest,
                                                                 MPoly partial) {
            if (rest.empty()) {
                acc += partial;
                return;
            }
            int first = rest[0];
            for (std::size_t t = 1; t < rest.size(); ++t) {
                Sym2Index J(first, rest[t]);
                MPoly factor = MPoly::var(J.var_name());
                if (!J.diagonal()) factor = factor * Rat(1, 2);
                std::vector<int> next;
                for (std::size_t u = 1; u < rest.size(); ++u)
                    if (u != t) next.push_back(rest[u]);
                pair(next, partial * factor);
            }
        };
        MPoly one = MPoly::one();
        pair(I, one);
        out.push_back(acc);
    }
    return out;
}

}  // namespace tautring
