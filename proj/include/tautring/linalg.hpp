#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "tautring/rational.hpp"

namespace tautring {

// Dense rational matrix with exact elimination.
class QMatrix {
public:
    QMatrix() : rows_(0), cols_(0) {}
    QMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows, std::vector<Rat>(cols, Rat(0))) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Rat& at(std::size_t i, std::size_t j) { return a_[i][j]; }
    const Rat& at(std::size_t i, std::size_t j) const { return a_[i][j]; }

    // Reduced row echelon form; returns pivot column per pivot row.
    std::vector<std::size_t> rref() {
        std::vector<std::size_t> pivots;
        std::size_t r = 0;
        for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
            std::size_t sel = r;
            while (sel < rows_ && a_[sel][c].is_zero()) ++sel;
            if (sel == rows_) continue;
            std::swap(a_[sel], a_[r]);
            Rat inv = Rat(1) / a_[r][c];
            for (std::size_t j = c; j < cols_; ++j) a_[r][j] *= inv;
            for (std::size_t i = 0; i < rows_; ++i) {
                if (i == r || a_[i][c].is_zero()) continue;
                Rat f = a_[i][c];
                for (std::size_t j = c; j < cols_; ++j) a_[i][j] -= f * a_[r][j];
            }
            pivots.push_back(c);
            ++r;
        }
        return pivots;
    }

    std::size_t rank() const {
        QMatrix m(*this);
        return m.rref().size();
    }

    bool is_square_nonsingular() const {
        return rows_ == cols_ && rank() == rows_;
    }

    Rat det() const {
        if (rows_ != cols_) throw Error("NotSquare", "determinant of non-square matrix");
        QMatrix m(*this);
        Rat d(1);
        std::size_t n = rows_;
        for (std::size_t c = 0; c < n; ++c) {
            std::size_t sel = c;
            while (sel < n && m.a_[sel][c].is_zero()) ++sel;
            if (sel == n) return Rat(0);
            if (sel != c) { std::swap(m.a_[sel], m.a_[c]); d = -d; }
            d *= m.a_[c][c];
            Rat inv = Rat(1) / m.a_[c][c];
            for (std::size_t i = c + 1; i < n; ++i) {
                if (m.a_[i][c].is_zero()) continue;
                Rat f = m.a_[i][c] * inv;
                for (std::size_t j = c; j < n; ++j) m.a_[i][j] -= f * m.a_[c][j];
            }
        }
        return d;
    }

private:
    std::size_t rows_, cols_;
    std::vector<std::vector<Rat>> a_;
};

struct LinearSolution {
    enum Kind { Unique, NoSolution, Affine } kind = NoSolution;
    std::vector<Rat> x;        // one solution when kind != NoSolution
    std::size_t free_dims = 0; // dimension of the solution affine space
};

// Exact solve of A x = b, reporting solution-set structure.
inline LinearSolution solve_linear(const QMatrix& A, const std::vector<Rat>& b) {
    if (b.size() != A.rows()) throw Error("BadDimensions", "rhs length mismatch");
    std::size_t n = A.cols();
    QMatrix aug(A.rows(), n + 1);
    for (std::size_t i = 0; i < A.rows(); ++i) {
        for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = A.at(i, j);
        aug.at(i, n) = b[i];
    }
    auto pivots = aug.rref();
    LinearSolution sol;
    for (std::size_t c : pivots) {
        if (c == n) { sol.kind = LinearSolution::NoSolution; return sol; }
    }
    sol.x.assign(n, Rat(0));
    for (std::size_t r = 0; r < pivots.size(); ++r) sol.x[pivots[r]] = aug.at(r, n);
    sol.free_dims = n - pivots.size();
    sol.kind = sol.free_dims == 0 ? LinearSolution::Unique : LinearSolution::Affine;
    return sol;
}

// Sparse row over the rationals, kept sorted by column.
using SparseRow = std::vector<std::pair<std::size_t, Rat>>;

// Incremental exact echelon basis keyed by leading column. Used for
// normal-form reduction against a relation span.
class EchelonBasis {
public:
    // Reduces the row against the basis until no pivot column remains.
    SparseRow reduce(SparseRow row) const {
        normalize_order(row);
        for (;;) {
            std::size_t k = row.size();
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (rows_.count(row[i].first)) { k = i; break; }
            }
            if (k == row.size()) return row;
            const SparseRow& pivot = rows_.at(row[k].first);
            row = axpy(row, pivot, -row[k].second);
        }
    }

    // Reduces and, if nonzero, inserts. Returns true when the row enlarged
    // the span.
    bool insert(SparseRow row) {
        row = reduce(std::move(row));
        if (row.empty()) return false;
        Rat inv = Rat(1) / row.front().second;
        for (auto& [c, v] : row) v *= inv;
        rows_.emplace(row.front().first, std::move(row));
        return true;
    }

    std::size_t rank() const { return rows_.size(); }

    bool has_pivot(std::size_t col) const { return rows_.count(col) > 0; }

    const std::map<std::size_t, SparseRow>& rows() const { return rows_; }

private:
    static void normalize_order(SparseRow& row) {
        std::sort(row.begin(), row.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        SparseRow out;
        for (auto& [c, v] : row) {
            if (!out.empty() && out.back().first == c) out.back().second += v;
            else out.emplace_back(c, v);
        }
        row.clear();
        for (auto& [c, v] : out)
            if (!v.is_zero()) row.emplace_back(c, v);
    }

    static SparseRow axpy(const SparseRow& a, const SparseRow& b, const Rat& f) {
        SparseRow out;
        out.reserve(a.size() + b.size());
        std::size_t i = 0, j = 0;
        while (i < a.size() || j < b.size()) {
            if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
                out.push_back(a[i++]);
            } else if (i == a.size() || b[j].first < a[i].first) {
                out.emplace_back(b[j].first, f * b[j].second);
                ++j;
            } else {
                Rat v = a[i].second + f * b[j].second;
                if (!v.is_zero()) out.emplace_back(a[i].first, v);
                ++i;
                ++j;
            }
        }
        return out;
    }

    std::map<std::size_t, SparseRow> rows_;
};

// Row echelon rank and pivot columns over Z/p for a 61-bit prime, used as a
// certified accelerator: a nonzero minor mod p stays nonzero over Q, so a
// pivot set found mod p is an independent set over Q.
class ModpEchelon {
public:
    explicit ModpEchelon(std::uint64_t p) : p_(p) {}

    using Row = std::vector<std::pair<std::size_t, std::uint64_t>>;

    bool insert(Row row) {
        for (;;) {
            if (row.empty()) return false;
            auto it = rows_.find(row.front().first);
            if (it == rows_.end()) break;
            std::uint64_t f = p_ - row.front().second;  // stored pivot is 1
            row = axpy(row, it->second, f);
        }
        std::uint64_t inv = inverse(row.front().second);
        for (auto& [c, v] : row) v = mulmod(v, inv);
        rows_.emplace(row.front().first, std::move(row));
        return true;
    }

    std::size_t rank() const { return rows_.size(); }
    bool has_pivot(std::size_t col) const { return rows_.count(col) > 0; }
    std::vector<std::size_t> pivot_columns() const {
        std::vector<std::size_t> out;
        for (auto& [c, r] : rows_) out.push_back(c);
        return out;
    }

    std::uint64_t p() const { return p_; }

    std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) const {
        return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p_);
    }

private:
    Row axpy(const Row& a, const Row& b, std::uint64_t f) const {
        Row out;
        out.reserve(a.size() + b.size());
        std::size_t i = 0, j = 0;
        while (i < a.size() || j < b.size()) {
            if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
                out.push_back(a[i++]);
            } else if (i == a.size() || b[j].first < a[i].first) {
                out.emplace_back(b[j].first, mulmod(b[j].second, f));
                ++j;
            } else {
                std::uint64_t v = (a[i].second + mulmod(b[j].second, f)) % p_;
                if (v) out.emplace_back(a[i].first, v);
                ++i;
                ++j;
            }
        }
        return out;
    }

    std::uint64_t inverse(std::uint64_t a) const {
        // Fermat inverse.
        std::uint64_t e = p_ - 2, r = 1, b = a % p_;
        while (e) {
            if (e & 1) r = mulmod(r, b);
            b = mulmod(b, b);
            e >>= 1;
        }
        return r;
    }

    std::uint64_t p_;
    std::map<std::size_t, Row> rows_;
};

}  // namespace tautring
