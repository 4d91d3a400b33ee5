#pragma once

// Degreewise linear algebra on graded pieces of free R/(h)-modules of forms.

#include "finj/linalg.hpp"
#include "finj/ring.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace finj {

/// Rational degree with denominator 1 or p, kept in lowest terms.
class Degree {
public:
    Degree(long num = 0, long den = 1) : num_(num), den_(den) {
        if (den_ <= 0) throw InvariantError("degree denominator must be positive");
        long g = std::gcd(std::labs(num_), den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }
    long num() const { return num_; }
    long den() const { return den_; }
    bool is_integral() const { return den_ == 1; }

    friend bool operator==(const Degree& a, const Degree& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator<(const Degree& a, const Degree& b) { return a.num_ * b.den_ < b.num_ * a.den_; }
    friend bool operator<=(const Degree& a, const Degree& b) { return !(b < a); }

    std::string str() const { return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_); }

private:
    long num_, den_;
};

/// Finite window of degrees lo, lo+step, ..., hi with step 1/den.
struct DegreeWindow {
    Degree lo, hi;
    long den = 1;

    std::vector<Degree> degrees() const {
        if (hi < lo) throw InputError("empty degree window");
        std::vector<Degree> out;
        long a = lo.num() * (den / lo.den());
        long b = hi.num() * (den / hi.den());
        for (long x = a; x <= b; ++x) out.emplace_back(x, den);
        return out;
    }
};

using WedgeMask = unsigned;

inline int wedge_degree(WedgeMask I) { return std::popcount(I); }

inline std::vector<int> wedge_indices(WedgeMask I) {
    std::vector<int> out;
    for (int i = 0; I >> i; ++i)
        if ((I >> i) & 1u) out.push_back(i);
    return out;
}

inline int wedge_weight(const WeightSystem& w, WedgeMask I) {
    int s = 0;
    for (int i : wedge_indices(I)) s += w[i];
    return s;
}

/// All index sets of size j in {0..n-1}, ordered lexicographically on the sorted indices.
inline std::vector<WedgeMask> wedge_sets(int n, int j) {
    std::vector<std::vector<int>> lists;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(cur.size()) == j) {
            lists.push_back(cur);
            return;
        }
        for (int i = start; i < n; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    if (j >= 0 && j <= n) rec(rec, 0);
    std::vector<WedgeMask> out;
    for (auto& l : lists) {
        WedgeMask m = 0;
        for (int i : l) m |= 1u << i;
        out.push_back(m);
    }
    return out;
}

inline bool wedge_less(WedgeMask a, WedgeMask b) { return wedge_indices(a) < wedge_indices(b); }

/// Sign of dx_I ^ dx_J relative to dx_{I u J}; 0 when I and J meet.
inline int shuffle_sign(WedgeMask I, WedgeMask J) {
    if (I & J) return 0;
    int inversions = 0;
    for (int j : wedge_indices(J)) inversions += std::popcount(I >> (j + 1));
    return inversions % 2 ? -1 : 1;
}

/// Basis element (monomial) * dx_I, or (monomial) * e_i of a free module summand.
struct BasisLabel {
    Exponents mono;
    WedgeMask summand = 0;

    friend bool operator==(const BasisLabel& a, const BasisLabel& b) {
        return a.mono == b.mono && a.summand == b.summand;
    }
};

inline std::string to_string(const BasisLabel& l) {
    std::string s;
    for (std::size_t i = 0; i < l.mono.size(); ++i)
        if (l.mono[i]) s += (s.empty() ? "" : "*") + std::string("x") + std::to_string(i) + (l.mono[i] > 1 ? "^" + std::to_string(l.mono[i]) : "");
    if (s.empty()) s = "1";
    if (l.summand) {
        s += "*d";
        for (int i : wedge_indices(l.summand)) s += "x" + std::to_string(i);
    }
    return s;
}

/// A finite-dimensional F_p-space of one fixed degree with a labeled basis.
/// When `embedding` is non-empty the piece is a subspace (or complement) of a
/// parent piece and embedding[k] gives basis vector k in parent coordinates.
struct GradedPiece {
    Degree degree;
    std::vector<BasisLabel> basis;
    std::vector<Vec> embedding;

    std::size_t dim() const { return basis.size(); }
};

/// Matrix of a linear map between two graded pieces (target.dim x source.dim).
struct GradedMapPiece {
    GradedPiece source, target;
    Matrix matrix;
};

inline GradedMapPiece compose(const PrimeField& k, const GradedMapPiece& psi, const GradedMapPiece& phi) {
    if (phi.target.dim() != psi.source.dim()) throw InvariantError("composition of incompatible pieces");
    return {phi.source, psi.target, multiply(k, psi.matrix, phi.matrix)};
}

/// Coordinate space of the degree-u piece of a free module sum_I Q * dx_I
/// (|I| = j, optionally restricted to one fine-grading class).
class FormSpace {
public:
    FormSpace() = default;

    FormSpace(const QuotientRing& Q, int j, int u, const FineGrading* grading = nullptr,
              const Exponents* cls = nullptr) {
        const auto& w = Q.weights();
        for (WedgeMask I : wedge_sets(w.n(), j)) {
            int t = u - wedge_weight(w, I);
            if (t < 0) continue;
            for (const auto& m : Q.basis(t)) {
                if (grading && cls && class_of(*grading, m, I) != *cls) continue;
                labels_.push_back({m, I});
            }
        }
        std::sort(labels_.begin(), labels_.end(), [&](const BasisLabel& a, const BasisLabel& b) {
            if (a.mono != b.mono) return graded_lex_less(w, a.mono, b.mono);
            return wedge_less(a.summand, b.summand);
        });
        for (std::size_t i = 0; i < labels_.size(); ++i) index_[{labels_[i].mono, labels_[i].summand}] = i;
    }

    static Exponents class_of(const FineGrading& g, Exponents m, WedgeMask I) {
        for (int i : wedge_indices(I)) m[i] += 1;
        return g.key(std::move(m));
    }

    std::size_t dim() const { return labels_.size(); }
    const std::vector<BasisLabel>& labels() const { return labels_; }

    /// Index of (m, I), or -1 when absent.
    long find(const Exponents& m, WedgeMask I) const {
        auto it = index_.find({m, I});
        return it == index_.end() ? -1 : static_cast<long>(it->second);
    }

private:
    std::vector<BasisLabel> labels_;
    std::map<std::pair<Exponents, WedgeMask>, std::size_t> index_;
};

/// (sum_i O_D(-s_i))_e with the monomial normal-form basis.
inline GradedPiece free_module_piece(const std::vector<int>& shifts, const HypersurfaceData& D, Degree e) {
    if (!e.is_integral()) return {e, {}, {}};
    GradedPiece out{e, {}, {}};
    for (std::size_t i = 0; i < shifts.size(); ++i)
        for (const auto& m : D.ring->basis(static_cast<int>(e.num()) - shifts[i]))
            out.basis.push_back({m, static_cast<WedgeMask>(i)});
    return out;
}

inline GradedPiece kernel_piece(const PrimeField& k, const GradedMapPiece& phi) {
    std::vector<Vec> images;
    for (std::size_t c = 0; c < phi.matrix.cols; ++c) images.push_back(phi.matrix.column(c));
    auto ker = kernel_basis(k, images, phi.matrix.rows);
    GradedPiece out{phi.source.degree, {}, {}};
    for (auto& v : ker) {
        // label a kernel vector by its first nonzero source coordinate
        std::size_t c = 0;
        while (c < v.size() && v[c] == 0) ++c;
        out.basis.push_back(phi.source.basis.at(c));
        out.embedding.push_back(std::move(v));
    }
    return out;
}

inline GradedPiece image_piece(const PrimeField& k, const GradedMapPiece& phi) {
    Echelon im(k, phi.matrix.rows);
    for (std::size_t c = 0; c < phi.matrix.cols; ++c) im.insert(phi.matrix.column(c));
    GradedPiece out{phi.target.degree, {}, {}};
    for (std::size_t r = 0; r < im.rank(); ++r) {
        out.basis.push_back(phi.target.basis.at(im.pivots()[r]));
        out.embedding.push_back(im.rows()[r]);
    }
    return out;
}

struct SubspaceNotContained : InvariantError {
    using InvariantError::InvariantError;
};

/// ambient / sub, where sub is given by its embedding vectors in ambient coordinates.
inline GradedPiece quotient_piece(const PrimeField& k, const GradedPiece& sub, const GradedPiece& ambient) {
    Echelon s(k, ambient.dim());
    for (const auto& v : sub.embedding) {
        if (v.size() != ambient.dim()) throw SubspaceNotContained("subspace vector has wrong length");
        s.insert(v);
    }
    if (s.rank() != sub.dim()) throw SubspaceNotContained("subspace basis is not independent in ambient");
    GradedPiece out{ambient.degree, {}, {}};
    // complement spanned by non-pivot unit vectors
    std::vector<bool> piv(ambient.dim(), false);
    for (auto c : s.pivots()) piv[c] = true;
    for (std::size_t c = 0; c < ambient.dim(); ++c) {
        if (piv[c]) continue;
        Vec e(ambient.dim(), 0);
        e[c] = 1;
        out.basis.push_back(ambient.basis[c]);
        out.embedding.push_back(std::move(e));
    }
    return out;
}

} // namespace finj
