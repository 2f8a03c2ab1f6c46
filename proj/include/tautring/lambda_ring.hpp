#pragma once

#include <map>
#include <string>
#include <vector>

#include "tautring/linalg.hpp"
#include "tautring/mpoly.hpp"
#include "tautring/numbers.hpp"

namespace tautring {

inline std::string lambda_name(int i) { return "l" + std::to_string(i); }

// Polynomial in lambda_1..lambda_g with deg lambda_i = i.
inline MPoly lambda_var(int i) { return MPoly::var(lambda_name(i), i); }

// The graded algebra Q[l_1..l_g] / (l_g, graded pieces of c(E)c(E~)-1),
// with a monomial basis and normal-form reduction per degree.
class LambdaBasis {
public:
    static constexpr int kDefaultGenusCap = 12;

    explicit LambdaBasis(int g, int genus_cap = kDefaultGenusCap) : g_(g) {
        if (g < 1) throw Error("BadGenus", "g must be >= 1");
        if (g > genus_cap)
            throw Error("GenusCapExceeded",
                        "g=" + std::to_string(g) + " exceeds cap " + std::to_string(genus_cap));
        socle_degree_ = g * (g - 1) / 2;
        build();
    }

    int genus() const { return g_; }
    int socle_degree() const { return socle_degree_; }

    const std::vector<std::vector<MPoly::Expo>>& basis() const { return basis_; }

    std::vector<int> dims() const {
        std::vector<int> d;
        for (auto& b : basis_) d.push_back(static_cast<int>(b.size()));
        return d;
    }

    int total_dim() const {
        int t = 0;
        for (auto& b : basis_) t += static_cast<int>(b.size());
        return t;
    }

    const std::vector<std::string>& var_names() const { return names_; }
    const std::vector<int>& var_weights() const { return weights_; }

    // Coordinates of a homogeneous polynomial in the degree-k monomial basis.
    // Degrees above the socle reduce to zero and yield an empty vector; a
    // failure to reduce to zero there raises DegreeOutOfRange.
    std::vector<Rat> normal_form(const MPoly& x, int k) const {
        if (k > socle_degree_) {
            auto r = reduce_raw(x, k);
            if (!r.empty())
                throw Error("DegreeOutOfRange", "nonzero class above the socle degree");
            return {};
        }
        auto row = reduce_raw(x, k);
        std::vector<Rat> coords(basis_[k].size(), Rat(0));
        for (auto& [col, v] : row) {
            int b = basis_index_.at(k).at(col);
            if (b < 0) throw Error("Internal", "reduction left a non-basis monomial");
            coords[static_cast<std::size_t>(b)] = v;
        }
        return coords;
    }

    MPoly basis_monomial(int k, std::size_t i) const {
        MPoly m(names_, weights_);
        m.add_term(basis_[k][i], Rat(1));
        return m;
    }

private:
    void build() {
        names_.clear();
        weights_.clear();
        for (int i = 1; i <= g_; ++i) {
            names_.push_back(lambda_name(i));
            weights_.push_back(i);
        }
        // Relation generators: the homogeneous pieces of c(E)c(E~) - 1 in
        // degrees 2,4,..,2g together with l_g.
        MPoly cE = MPoly::one(), cEd = MPoly::one();
        for (int i = 1; i <= g_; ++i) {
            cE += lambda_var(i);
            cEd += Rat(i % 2 ? -1 : 1) * lambda_var(i);
        }
        MPoly rel = cE * cEd - MPoly::one();
        std::vector<MPoly> gens;
        for (int d = 1; d <= 2 * g_; ++d) {
            MPoly piece = rel.graded_piece(d);
            if (!piece.is_zero()) gens.push_back(piece.remapped(names_, weights_));
        }
        gens.push_back(lambda_var(g_).remapped(names_, weights_));

        int top = socle_degree_;
        monomials_.assign(top + 1, {});
        for (int k = 0; k <= top; ++k) monomials_[k] = weighted_monomials(k);

        echelons_.assign(top + 1, EchelonBasis());
        basis_.assign(top + 1, {});
        basis_index_.assign(top + 1, {});
        for (int k = 0; k <= top; ++k) {
            auto& ech = echelons_[k];
            for (auto& gen : gens) {
                int gd = gen.degree();
                if (gd > k) continue;
                for (auto& m : weighted_monomials(k - gd)) {
                    MPoly shifted(names_, weights_);
                    shifted.add_term(m, Rat(1));
                    ech.insert(to_row(shifted * gen, k));
                }
            }
            auto& index = basis_index_[k];
            for (std::size_t i = 0; i < monomials_[k].size(); ++i) {
                if (ech.has_pivot(i)) {
                    index[i] = -1;
                } else {
                    index[i] = static_cast<int>(basis_[k].size());
                    basis_[k].push_back(monomials_[k][i]);
                }
            }
        }
        // Reduce relations also above the socle degree lazily when queried.
        gens_ = gens;
    }

    // All exponent vectors on (l_1..l_g) of weighted degree k.
    std::vector<MPoly::Expo> weighted_monomials(int k) const {
        std::vector<MPoly::Expo> out;
        MPoly::Expo cur(g_, 0);
        rec_monomials(k, g_, cur, out);
        return out;
    }

    void rec_monomials(int rem, int maxvar, MPoly::Expo& cur,
                       std::vector<MPoly::Expo>& out) const {
        if (maxvar == 0) {
            if (rem == 0) out.push_back(cur);
            return;
        }
        int w = maxvar;  // weight of l_maxvar
        for (int e = 0; e * w <= rem; ++e) {
            cur[maxvar - 1] = e;
            rec_monomials(rem - e * w, maxvar - 1, cur, out);
        }
        cur[maxvar - 1] = 0;
    }

    SparseRow to_row(const MPoly& p, int k) const {
        SparseRow row;
        MPoly q = p.remapped(names_, weights_);
        for (auto& [e, c] : q.terms()) {
            auto it = position_index(k).find(e);
            if (it == position_index(k).end())
                throw Error("Internal", "monomial outside degree-" + std::to_string(k) + " table");
            row.emplace_back(it->second, c);
        }
        return row;
    }

    const std::map<MPoly::Expo, std::size_t>& position_index(int k) const {
        auto it = posidx_.find(k);
        if (it != posidx_.end()) return it->second;
        std::map<MPoly::Expo, std::size_t> m;
        for (std::size_t i = 0; i < monomials_[k].size(); ++i) m[monomials_[k][i]] = i;
        return posidx_.emplace(k, std::move(m)).first->second;
    }

    // Reduction valid for any degree <= socle (uses cached echelon) or above
    // (builds a temporary echelon).
    SparseRow reduce_raw(const MPoly& x, int k) const {
        MPoly xr = x.remapped(names_, weights_);
        if (!xr.graded_piece(k).is_homogeneous() || xr != xr.graded_piece(k))
            throw Error("WrongDegree", "input not homogeneous of the requested degree");
        if (k <= socle_degree_) return echelons_[k].reduce(row_for(xr, k));
        // Above the socle: build echelon for this degree on the fly.
        EchelonBasis ech;
        auto monos = weighted_monomials(k);
        std::map<MPoly::Expo, std::size_t> pos;
        for (std::size_t i = 0; i < monos.size(); ++i) pos[monos[i]] = i;
        for (auto& gen : gens_) {
            int gd = gen.degree();
            if (gd > k) continue;
            for (auto& m : weighted_monomials(k - gd)) {
                MPoly shifted(names_, weights_);
                shifted.add_term(m, Rat(1));
                MPoly prod = (shifted * gen).remapped(names_, weights_);
                SparseRow row;
                for (auto& [e, c] : prod.terms()) row.emplace_back(pos.at(e), c);
                ech.insert(std::move(row));
            }
        }
        SparseRow row;
        for (auto& [e, c] : xr.terms()) row.emplace_back(pos.at(e), c);
        return ech.reduce(std::move(row));
    }

    SparseRow row_for(const MPoly& p, int k) const {
        SparseRow row;
        for (auto& [e, c] : p.terms()) row.emplace_back(position_index(k).at(e), c);
        return row;
    }

    int g_;
    int socle_degree_;
    std::vector<std::string> names_;
    std::vector<int> weights_;
    std::vector<MPoly> gens_;
    std::vector<std::vector<MPoly::Expo>> monomials_;
    std::vector<EchelonBasis> echelons_;
    std::vector<std::vector<MPoly::Expo>> basis_;
    std::vector<std::map<std::size_t, int>> basis_index_;
    mutable std::map<int, std::map<MPoly::Expo, std::size_t>> posidx_;
};

inline LambdaBasis build_ring(int g, int genus_cap = LambdaBasis::kDefaultGenusCap) {
    return LambdaBasis(g, genus_cap);
}

// Coefficient of x (homogeneous of socle degree) relative to prod_{i<g} l_i.
inline Rat socle_eval(const MPoly& x, const LambdaBasis& basis) {
    int D = basis.socle_degree();
    if (x.is_zero()) return Rat(0);
    if (!(x == x.graded_piece(D))) throw Error("WrongDegree", "not of socle degree");
    auto coords = basis.normal_form(x, D);
    if (coords.size() != 1) throw Error("Internal", "socle is not 1-dimensional");
    // Normalize against the socle generator prod_{i=1}^{g-1} l_i.
    MPoly gen = MPoly::one();
    for (int i = 1; i < basis.genus(); ++i) gen = gen * lambda_var(i);
    if (basis.genus() == 1) gen = MPoly::one();
    auto gc = basis.normal_form(gen.remapped(basis.var_names(), basis.var_weights()), D);
    if (gc.size() != 1 || gc[0].is_zero())
        throw Error("Internal", "socle generator reduced to zero");
    return coords[0] / gc[0];
}

// gamma_g = prod_{i=1}^g |B_{2i}| / (4i).
inline Rat gamma_constant(int g) {
    Rat r(1);
    for (int i = 1; i <= g; ++i) r *= bernoulli(2 * i).abs() / Rat(4 * i);
    return r;
}

// socle_eval times gamma_g (the lambda_g-evaluation of the socle).
inline Rat ab_evaluate(const MPoly& x, const LambdaBasis& basis) {
    return socle_eval(x, basis) * gamma_constant(basis.genus());
}

// Matrix of <a,b> = ab_evaluate(a*b) between the degree-k and complementary
// degree bases.
inline QMatrix pairing_matrix(const LambdaBasis& basis, int k) {
    int D = basis.socle_degree();
    if (k < 0 || k > D) throw Error("WrongDegree", "pairing degree out of range");
    auto& bk = basis.basis()[k];
    auto& bc = basis.basis()[D - k];
    QMatrix M(bk.size(), bc.size());
    for (std::size_t i = 0; i < bk.size(); ++i)
        for (std::size_t j = 0; j < bc.size(); ++j)
            M.at(i, j) = ab_evaluate(basis.basis_monomial(k, i) * basis.basis_monomial(D - k, j),
                                     basis);
    return M;
}

}  // namespace tautring
