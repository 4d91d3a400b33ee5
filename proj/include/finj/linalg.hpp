#pragma once

#include "finj/field.hpp"

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace finj {

using Vec = std::vector<Scalar>;

inline bool is_zero(const Vec& v) {
    for (Scalar x : v)
        if (x) return false;
    return true;
}

namespace detail {

template <Scalar P>
inline void axpy_fixed(Scalar* d, const Scalar* s, Scalar c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) d[i] = (d[i] + c * s[i]) % P;
}

inline void axpy_small(Scalar* d, const Scalar* s, Scalar c, std::size_t n, Scalar p) {
    for (std::size_t i = 0; i < n; ++i) d[i] = (d[i] + c * s[i]) % p;
}

inline void axpy_wide(Scalar* d, const Scalar* s, Scalar c, std::size_t n, std::uint64_t p) {
    for (std::size_t i = 0; i < n; ++i)
        if (s[i]) d[i] = static_cast<Scalar>((d[i] + static_cast<std::uint64_t>(c) * s[i]) % p);
}

/// d[0..n) += c * s[0..n) over F_p.
inline void axpy_raw(Scalar p, Scalar* d, const Scalar* s, Scalar c, std::size_t n) {
    switch (p) {
    case 2: return axpy_fixed<2>(d, s, c, n);
    case 3: return axpy_fixed<3>(d, s, c, n);
    case 5: return axpy_fixed<5>(d, s, c, n);
    case 7: return axpy_fixed<7>(d, s, c, n);
    case 11: return axpy_fixed<11>(d, s, c, n);
    case 13: return axpy_fixed<13>(d, s, c, n);
    default:
        if (p < (1u << 16)) return axpy_small(d, s, c, n, p);
        return axpy_wide(d, s, c, n, p);
    }
}

} // namespace detail

/// dst += c * src, starting at column `from` (entries before it are known zero in src).
inline void axpy(const PrimeField& k, Vec& dst, const Vec& src, Scalar c, std::size_t from = 0) {
    if (c == 0 || from >= dst.size()) return;
    detail::axpy_raw(k.p(), dst.data() + from, src.data() + from, c, dst.size() - from);
}

/// Dense row-major matrix over F_p.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<Scalar> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0) {}

    Scalar& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    Scalar operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    Vec column(std::size_t j) const {
        Vec v(rows);
        for (std::size_t i = 0; i < rows; ++i) v[i] = (*this)(i, j);
        return v;
    }
    void set_column(std::size_t j, const Vec& v) {
        for (std::size_t i = 0; i < rows; ++i) (*this)(i, j) = v[i];
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    friend bool operator==(const Matrix& x, const Matrix& y) {
        return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
    }
};

inline Vec apply(const PrimeField& k, const Matrix& m, const Vec& v) {
    Vec out(m.rows, 0);
    const std::uint64_t p = k.p();
    for (std::size_t i = 0; i < m.rows; ++i) {
        std::uint64_t acc = 0;
        for (std::size_t j = 0; j < m.cols; ++j) acc = (acc + static_cast<std::uint64_t>(m(i, j)) * v[j]) % p;
        out[i] = static_cast<Scalar>(acc);
    }
    return out;
}

inline Matrix multiply(const PrimeField& k, const Matrix& x, const Matrix& y) {
    if (x.cols != y.rows) throw InvariantError("matrix product: dimension mismatch");
    Matrix out(x.rows, y.cols);
    const std::uint64_t p = k.p();
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t l = 0; l < x.cols; ++l) {
            std::uint64_t c = x(i, l);
            if (!c) continue;
            for (std::size_t j = 0; j < y.cols; ++j)
                out(i, j) = static_cast<Scalar>((out(i, j) + c * y(l, j)) % p);
        }
    return out;
}

/// A subspace of F_p^dim kept in reduced row echelon form.  Pivot columns are
/// chosen by fixed column order, so the stored basis is canonical.
class Echelon {
public:
    Echelon(const PrimeField& k, std::size_t dim) : k_(k), dim_(dim) {}

    std::size_t ambient_dim() const { return dim_; }
    std::size_t rank() const { return rows_.size(); }
    const std::vector<Vec>& rows() const { return rows_; }
    const std::vector<std::size_t>& pivots() const { return piv_; }

    /// Reduce v in place modulo the subspace.
    void reduce(Vec& v) const {
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            Scalar c = v[piv_[r]];
            if (c) axpy(k_, v, rows_[r], k_.neg(c), piv_[r]);
        }
    }

    /// Reduce v and return the coefficients used (v_in = sum coeffs[r]*rows[r] + residual).
    Vec reduce_with_coeffs(Vec& v) const {
        Vec coeffs(rows_.size(), 0);
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            Scalar c = v[piv_[r]];
            if (c) {
                coeffs[r] = c;
                axpy(k_, v, rows_[r], k_.neg(c), piv_[r]);
            }
        }
        return coeffs;
    }

    bool contains(Vec v) const {
        reduce(v);
        return is_zero(v);
    }

    /// Insert v; returns true if it enlarged the subspace.
    bool insert(Vec v) {
        reduce(v);
        std::size_t pc = 0;
        while (pc < dim_ && v[pc] == 0) ++pc;
        if (pc == dim_) return false;
        Scalar inv = k_.inv(v[pc]);
        for (std::size_t i = pc; i < dim_; ++i)
            if (v[i]) v[i] = k_.mul(v[i], inv);
        for (auto& row : rows_) {
            Scalar c = row[pc];
            if (c) axpy(k_, row, v, k_.neg(c), pc);
        }
        // keep rows sorted by pivot column
        std::size_t pos = 0;
        while (pos < piv_.size() && piv_[pos] < pc) ++pos;
        rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(v));
        piv_.insert(piv_.begin() + static_cast<std::ptrdiff_t>(pos), pc);
        return true;
    }

    bool contains_subspace(const Echelon& other) const {
        for (const auto& r : other.rows())
            if (!contains(r)) return false;
        return true;
    }

    const PrimeField& field() const { return k_; }

private:
    PrimeField k_;
    std::size_t dim_;
    std::vector<Vec> rows_;
    std::vector<std::size_t> piv_;
};

inline Echelon span(const PrimeField& k, std::size_t dim, const std::vector<Vec>& gens) {
    Echelon e(k, dim);
    for (const auto& g : gens) e.insert(g);
    return e;
}

/// Basis of {c : sum_k c_k * images[k] = 0}, canonical: one vector per free
/// column of the reduced echelon form of [images], with a 1 there.
inline std::vector<Vec> kernel_basis(const PrimeField& k, const std::vector<Vec>& images, std::size_t target_dim) {
    const std::size_t m = images.size();
    if (m == 0) return {};
    const Scalar p = k.p();
    // rows = target coordinates, columns = images
    std::vector<Scalar> a(target_dim * m);
    for (std::size_t c = 0; c < m; ++c)
        for (std::size_t r = 0; r < target_dim; ++r) a[r * m + c] = images[c][r];
    std::vector<Scalar*> row(target_dim);
    for (std::size_t r = 0; r < target_dim; ++r) row[r] = a.data() + r * m;
    std::vector<std::size_t> pivcol;
    std::size_t lead = 0;
    for (std::size_t col = 0; col < m && lead < target_dim; ++col) {
        std::size_t sel = lead;
        while (sel < target_dim && row[sel][col] == 0) ++sel;
        if (sel == target_dim) continue;
        std::swap(row[sel], row[lead]);
        Scalar* pr = row[lead];
        Scalar inv = k.inv(pr[col]);
        for (std::size_t x = col; x < m; ++x) pr[x] = k.mul(pr[x], inv);
        for (std::size_t r = 0; r < target_dim; ++r) {
            if (r == lead) continue;
            Scalar c = row[r][col];
            if (c) detail::axpy_raw(p, row[r] + col, pr + col, p - c, m - col);
        }
        pivcol.push_back(col);
        ++lead;
    }
    std::vector<bool> is_piv(m, false);
    for (auto c : pivcol) is_piv[c] = true;
    std::vector<Vec> out;
    for (std::size_t f = 0; f < m; ++f) {
        if (is_piv[f]) continue;
        Vec v(m, 0);
        v[f] = 1;
        for (std::size_t r = 0; r < pivcol.size(); ++r) v[pivcol[r]] = k.neg(row[r][f]);
        out.push_back(std::move(v));
    }
    return out;
}

inline std::size_t rank_of(const PrimeField& k, const std::vector<Vec>& vecs, std::size_t dim) {
    return span(k, dim, vecs).rank();
}

/// U / V for subspaces V <= U of a common coordinate space.  The quotient
/// basis is the reduced echelon basis of U modulo V; coordinates of a vector
/// of U are read off at its pivots.  When U is the whole space the basis is
/// the set of unit vectors at the non-pivot columns of V.
class Subquotient {
public:
    Subquotient(const PrimeField& k, std::size_t dim) : rel_(k, dim), quot_(k, dim) {}

    /// Build from generators.  Generators of V need not lie in span(U gens):
    /// U is taken to be span(U gens) + V.
    static Subquotient build(const PrimeField& k, std::size_t dim, const std::vector<Vec>& u_gens,
                             const std::vector<Vec>& v_gens) {
        Subquotient s(k, dim);
        for (const auto& v : v_gens) s.rel_.insert(v);
        for (auto u : u_gens) s.add_generator(std::move(u));
        return s;
    }

    static Subquotient build(Echelon rel, const std::vector<Vec>& u_gens) {
        Subquotient s(rel.field(), rel.ambient_dim());
        s.rel_ = std::move(rel);
        for (auto u : u_gens) s.add_generator(std::move(u));
        return s;
    }

    /// U = the whole space.
    static Subquotient full(const PrimeField& k, std::size_t dim, const std::vector<Vec>& v_gens) {
        Echelon rel(k, dim);
        for (const auto& v : v_gens) rel.insert(v);
        return full(std::move(rel));
    }

    static Subquotient full(Echelon rel) {
        const std::size_t dim = rel.ambient_dim();
        Subquotient s(rel.field(), dim);
        s.rel_ = std::move(rel);
        s.full_ = true;
        std::vector<bool> piv(dim, false);
        for (auto c : s.rel_.pivots()) piv[c] = true;
        for (std::size_t c = 0; c < dim; ++c)
            if (!piv[c]) s.free_.push_back(c);
        return s;
    }

    std::size_t dim() const { return full_ ? free_.size() : quot_.rank(); }
    std::size_t ambient_dim() const { return rel_.ambient_dim(); }
    const Echelon& relations() const { return rel_; }
    bool is_full() const { return full_; }

    /// Ambient representative of the i-th basis vector.
    Vec basis_vector(std::size_t i) const {
        if (!full_) return quot_.rows()[i];
        Vec e(ambient_dim(), 0);
        e[free_[i]] = 1;
        return e;
    }

    /// Coordinates of the class of v; nullopt when v is not in U.
    std::optional<Vec> coords(Vec v) const {
        rel_.reduce(v);
        if (full_) {
            Vec c(free_.size());
            for (std::size_t i = 0; i < free_.size(); ++i) c[i] = v[free_[i]];
            return c;
        }
        Vec c = quot_.reduce_with_coeffs(v);
        if (!is_zero(v)) return std::nullopt;
        return c;
    }

    /// Class of v is zero (v in V).
    bool is_trivial(Vec v) const { return rel_.contains(std::move(v)); }

    Vec lift(const Vec& coords) const {
        Vec out(ambient_dim(), 0);
        if (full_) {
            for (std::size_t i = 0; i < coords.size(); ++i) out[free_[i]] = coords[i];
            return out;
        }
        for (std::size_t i = 0; i < coords.size(); ++i) axpy(quot_.field(), out, quot_.rows()[i], coords[i]);
        return out;
    }

private:
    void add_generator(Vec u) {
        rel_.reduce(u);
        quot_.insert(std::move(u));
    }

    Echelon rel_;
    Echelon quot_;
    bool full_ = false;
    std::vector<std::size_t> free_;
};

} // namespace finj
