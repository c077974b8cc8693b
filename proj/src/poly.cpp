#include "fforbit/poly.hpp"

namespace fforbit {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("polynomial coefficient overflow");
    return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("polynomial coefficient overflow");
    return r;
}

void enumerate(unsigned dim, unsigned var, unsigned remaining, ExpVec& cur, std::vector<ExpVec>& out) {
    if (var == dim) {
        if (remaining == 0) out.push_back(cur);
        return;
    }
    // Earlier variables take the highest powers first (lex-descending
    // within a grade once sorted).
    for (int e = static_cast<int>(remaining); e >= 0; --e) {
        cur[var] = static_cast<std::uint8_t>(e);
        enumerate(dim, var + 1, remaining - static_cast<unsigned>(e), cur, out);
    }
    cur[var] = 0;
}

}  // namespace

std::vector<ExpVec> monomial_basis(unsigned dim, unsigned deg) {
    if (dim == 0 || dim > kMaxDim) throw std::invalid_argument("dimension must be 1..4");
    std::vector<ExpVec> out;
    for (unsigned g = 0; g <= deg; ++g) {
        ExpVec cur{};
        std::vector<ExpVec> grade;
        enumerate(dim, 0, g, cur, grade);
        // enumerate() emits each grade in lex-descending order already.
        out.insert(out.end(), grade.begin(), grade.end());
    }
    return out;
}

MultiPoly MultiPoly::constant(unsigned dim, std::int64_t c) {
    MultiPoly p(dim);
    if (c != 0) p.terms_[ExpVec{}] = c;
    return p;
}

MultiPoly MultiPoly::variable(unsigned dim, unsigned var) {
    if (var >= dim) throw std::invalid_argument("variable index out of range");
    MultiPoly p(dim);
    ExpVec e{};
    e[var] = 1;
    p.terms_[e] = 1;
    return p;
}

bool MultiPoly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == ExpVec{});
}

unsigned MultiPoly::total_degree() const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, exp_total(e));
    return d;
}

std::int64_t MultiPoly::coeff(const ExpVec& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? 0 : it->second;
}

void MultiPoly::add_term(const ExpVec& e, std::int64_t c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second = checked_add(it->second, c);
        if (it->second == 0) terms_.erase(it);
    }
}

MultiPoly MultiPoly::operator+(const MultiPoly& rhs) const {
    if (dim_ != rhs.dim_) throw std::invalid_argument("dimension mismatch");
    MultiPoly out = *this;
    for (const auto& [e, c] : rhs.terms_) out.add_term(e, c);
    return out;
}

MultiPoly MultiPoly::operator-(const MultiPoly& rhs) const {
    if (dim_ != rhs.dim_) throw std::invalid_argument("dimension mismatch");
    MultiPoly out = *this;
    for (const auto& [e, c] : rhs.terms_) out.add_term(e, checked_mul(c, -1));
    return out;
}

MultiPoly MultiPoly::operator*(const MultiPoly& rhs) const {
    if (dim_ != rhs.dim_) throw std::invalid_argument("dimension mismatch");
    MultiPoly out(dim_);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : rhs.terms_) {
            ExpVec e{};
            for (unsigned i = 0; i < kMaxDim; ++i) {
                unsigned s = static_cast<unsigned>(ea[i]) + eb[i];
                if (s > 255) throw std::overflow_error("monomial degree overflow");
                e[i] = static_cast<std::uint8_t>(s);
            }
            out.add_term(e, checked_mul(ca, cb));
        }
    }
    return out;
}

MultiPoly MultiPoly::partial(unsigned var) const {
    if (var >= dim_) throw std::invalid_argument("variable index out of range");
    MultiPoly out(dim_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        ExpVec d = e;
        d[var] -= 1;
        out.add_term(d, checked_mul(c, static_cast<std::int64_t>(e[var])));
    }
    return out;
}

std::vector<std::int64_t> MultiPoly::dense_coeffs(unsigned deg) const {
    if (total_degree() > deg) throw std::invalid_argument("degree bound too small for polynomial");
    auto basis = monomial_basis(dim_, deg);
    std::vector<std::int64_t> out(basis.size(), 0);
    for (std::size_t i = 0; i < basis.size(); ++i) out[i] = coeff(basis[i]);
    return out;
}

MultiPoly MultiPoly::from_dense(unsigned dim, unsigned deg, std::span<const std::int64_t> coeffs) {
    auto basis = monomial_basis(dim, deg);
    if (coeffs.size() != basis.size())
        throw std::invalid_argument("dense coefficient list has wrong length");
    MultiPoly p(dim);
    for (std::size_t i = 0; i < basis.size(); ++i) p.add_term(basis[i], coeffs[i]);
    return p;
}

MultiPoly poly_matrix_det(const std::vector<MultiPoly>& entries, unsigned dim) {
    if (entries.size() != static_cast<std::size_t>(dim) * dim)
        throw std::invalid_argument("matrix entry count mismatch");
    if (dim == 1) return entries[0];
    unsigned vdim = entries[0].dim();
    MultiPoly det(vdim);
    // Expand along the first row; submatrices are built by index masks,
    // fine for dim <= 4.
    std::vector<unsigned> cols;
    for (unsigned c = 0; c < dim; ++c) cols.push_back(c);
    for (unsigned c = 0; c < dim; ++c) {
        std::vector<MultiPoly> minor;
        minor.reserve(static_cast<std::size_t>(dim - 1) * (dim - 1));
        for (unsigned r = 1; r < dim; ++r)
            for (unsigned cc = 0; cc < dim; ++cc)
                if (cc != c) minor.push_back(entries[r * dim + cc]);
        MultiPoly term = entries[c] * poly_matrix_det(minor, dim - 1);
        det = (c % 2 == 0) ? det + term : det - term;
    }
    return det;
}

}  // namespace fforbit
