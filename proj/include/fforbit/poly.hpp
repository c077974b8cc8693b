#pragma once

// Multivariate integer polynomials in up to four variables. Symbolic
// work (partial derivatives, products, determinants) happens here over
// exact 64-bit coefficients with overflow checks; per-prime evaluation
// tables are produced elsewhere from the dense coefficient layout.

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace fforbit {

inline constexpr unsigned kMaxDim = 4;
inline constexpr unsigned kMaxInputDegree = 8;

using ExpVec = std::array<std::uint8_t, kMaxDim>;

inline unsigned exp_total(const ExpVec& e) {
    unsigned s = 0;
    for (auto x : e) s += x;
    return s;
}

// Graded lexicographic: lower total degree first; within a grade,
// lexicographically with earlier variables dominating (x1^2 before x1*x2).
struct GradedLexLess {
    bool operator()(const ExpVec& a, const ExpVec& b) const {
        unsigned da = exp_total(a), db = exp_total(b);
        if (da != db) return da < db;
        return a > b;
    }
};

// All exponent vectors with total degree <= deg in graded-lex order.
std::vector<ExpVec> monomial_basis(unsigned dim, unsigned deg);

class MultiPoly {
public:
    explicit MultiPoly(unsigned dim) : dim_(dim) {
        if (dim == 0 || dim > kMaxDim) throw std::invalid_argument("dimension must be 1..4");
    }
    static MultiPoly constant(unsigned dim, std::int64_t c);
    static MultiPoly variable(unsigned dim, unsigned var);

    unsigned dim() const { return dim_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    unsigned total_degree() const;  // 0 for zero and constants

    std::int64_t coeff(const ExpVec& e) const;
    void add_term(const ExpVec& e, std::int64_t c);

    const std::map<ExpVec, std::int64_t, GradedLexLess>& terms() const { return terms_; }

    MultiPoly operator+(const MultiPoly& rhs) const;
    MultiPoly operator-(const MultiPoly& rhs) const;
    MultiPoly operator*(const MultiPoly& rhs) const;

    MultiPoly partial(unsigned var) const;

    // Dense coefficient list over monomial_basis(dim, deg); throws if the
    // polynomial has terms above deg.
    std::vector<std::int64_t> dense_coeffs(unsigned deg) const;

    static MultiPoly from_dense(unsigned dim, unsigned deg, std::span<const std::int64_t> coeffs);

private:
    unsigned dim_;
    std::map<ExpVec, std::int64_t, GradedLexLess> terms_;  // nonzero coefficients only
};

// Determinant of a dim x dim matrix of polynomials by cofactor
// expansion (division free); entries indexed row-major.
MultiPoly poly_matrix_det(const std::vector<MultiPoly>& entries, unsigned dim);

}  // namespace fforbit
