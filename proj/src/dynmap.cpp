#include "fforbit/dynmap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fforbit {

namespace {

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
    while (b) { a %= b; std::swap(a, b); }
    return a;
}

void trim_trailing_zeros(std::vector<std::int64_t>& v) {
    while (v.size() > 1 && v.back() == 0) v.pop_back();
    if (v.size() == 1 && v[0] == 0) v.clear();
}

// Determinant mod p of a square matrix given as signed integers.
std::uint64_t det_mod_p(const std::vector<std::int64_t>& m, unsigned n, const FpCtx& fp) {
    std::vector<std::uint64_t> a(n * n);
    for (unsigned i = 0; i < n * n; ++i) a[i] = fp.from_int(m[i]);
    std::uint64_t det = 1 % fp.p;
    for (unsigned c = 0; c < n; ++c) {
        unsigned pivot = c;
        while (pivot < n && a[pivot * n + c] == 0) ++pivot;
        if (pivot == n) return 0;
        if (pivot != c) {
            for (unsigned j = c; j < n; ++j) std::swap(a[pivot * n + j], a[c * n + j]);
            det = fp.neg(det);
        }
        std::uint64_t inv = fp.inv(a[c * n + c]);
        det = fp.mul(det, a[c * n + c]);
        for (unsigned r = c + 1; r < n; ++r) {
            if (a[r * n + c] == 0) continue;
            std::uint64_t f = fp.mul(a[r * n + c], inv);
            for (unsigned j = c; j < n; ++j)
                a[r * n + j] = fp.sub(a[r * n + j], fp.mul(f, a[c * n + j]));
        }
    }
    return det;
}

std::vector<std::uint32_t> crt_primes(double need_bits) {
    std::vector<std::uint32_t> primes;
    double have = 0;
    for (std::uint64_t c = (1ull << 31) - 1; have < need_bits; --c) {
        if (is_prime_u64(c)) {
            primes.push_back(static_cast<std::uint32_t>(c));
            have += 30.9;
        }
    }
    return primes;
}

}  // namespace

BigInt resultant_formal(std::span<const std::int64_t> a, unsigned da,
                        std::span<const std::int64_t> b, unsigned db) {
    if (da == 0 && db == 0) return BigInt(1);
    const unsigned n = da + db;
    // Sylvester matrix: db rows of a's coefficients, da rows of b's,
    // descending powers left to right, at the formal degrees.
    std::vector<std::int64_t> syl(static_cast<std::size_t>(n) * n, 0);
    auto coeff = [](std::span<const std::int64_t> c, unsigned formal, unsigned power) -> std::int64_t {
        // coefficient of x^power, zero-padded up to the formal degree
        if (power > formal) return 0;
        return power < c.size() ? c[power] : 0;
    };
    for (unsigned r = 0; r < db; ++r)
        for (unsigned k = 0; k <= da; ++k)
            syl[static_cast<std::size_t>(r) * n + (r + k)] = coeff(a, da, da - k);
    for (unsigned r = 0; r < da; ++r)
        for (unsigned k = 0; k <= db; ++k)
            syl[static_cast<std::size_t>(db + r) * n + (r + k)] = coeff(b, db, db - k);

    // Hadamard bound on |det| in bits, then enough CRT primes to cover
    // the symmetric range.
    double log2_bound = 1.0;
    for (unsigned r = 0; r < n; ++r) {
        double s = 0;
        for (unsigned c = 0; c < n; ++c) {
            double v = static_cast<double>(syl[static_cast<std::size_t>(r) * n + c]);
            s += v * v;
        }
        log2_bound += 0.5 * std::log2(std::max(s, 1.0));
    }
    auto primes = crt_primes(log2_bound + 2);

    BigInt result(0), modulus(1);
    for (std::uint32_t q : primes) {
        FpCtx fp(q);
        std::uint64_t r_q = det_mod_p(syl, n, fp);
        std::uint64_t cur = result.mod_u64(q);
        std::uint64_t m_q = modulus.mod_u64(q);
        std::uint64_t t = fp.mul(fp.sub(r_q, cur), fp.inv(m_q));
        BigInt add = modulus;
        add.mul_u64(t);
        result += add;
        modulus.mul_u64(q);
    }
    // Symmetric lift: values above modulus/2 are negative.
    BigInt twice = result;
    twice += result;
    if (twice.cmp_abs(modulus) > 0) result -= modulus;
    return result;
}

IntegerUniMap::IntegerUniMap(std::vector<std::int64_t> num, std::vector<std::int64_t> den)
    : num_(std::move(num)), den_(std::move(den)) {
    trim_trailing_zeros(num_);
    trim_trailing_zeros(den_);
    if (num_.empty() && den_.empty())
        throw std::invalid_argument("map is identically [0:0]");
    if (num_.empty()) num_ = {0};
    if (den_.empty()) den_ = {0};
    unsigned dn = static_cast<unsigned>(num_.size()) - 1;
    unsigned dd = static_cast<unsigned>(den_.size()) - 1;
    degree_ = std::max(dn, dd);
    if (degree_ < 1) throw std::invalid_argument("map degree must be at least 1");

    std::uint64_t content = 0;
    for (auto c : num_) content = gcd_u64(content, static_cast<std::uint64_t>(std::llabs(c)));
    for (auto c : den_) content = gcd_u64(content, static_cast<std::uint64_t>(std::llabs(c)));
    if (content > 1) {
        for (auto& c : num_) c /= static_cast<std::int64_t>(content);
        for (auto& c : den_) c /= static_cast<std::int64_t>(content);
    }

    resultant_ = resultant_formal(num_, degree_, den_, degree_);
    if (resultant_.is_zero())
        throw std::invalid_argument("numerator and denominator share a projective root");
}

ReducedUniMap::ReducedUniMap(const IntegerUniMap& map, Prime p) : fp_(p.value()), d_(map.degree()) {
    fa_.assign(d_ + 1, 0);
    ga_.assign(d_ + 1, 0);
    for (std::size_t i = 0; i < map.num().size(); ++i) fa_[i] = fp_.from_int(map.num()[i]);
    for (std::size_t i = 0; i < map.den().size(); ++i) ga_[i] = fp_.from_int(map.den()[i]);

    auto derivative = [&](const std::vector<std::uint64_t>& c) {
        std::vector<std::uint64_t> d(c.size() > 1 ? c.size() - 1 : 1, 0);
        for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = fp_.mul(c[i], i % fp_.p);
        return d;
    };
    auto poly_mul = [&](const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
        std::vector<std::uint64_t> out(a.size() + b.size() - 1, 0);
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] == 0) continue;
            for (std::size_t j = 0; j < b.size(); ++j)
                out[i + j] = fp_.add(out[i + j], fp_.mul(a[i], b[j]));
        }
        return out;
    };
    auto poly_sub = [&](std::vector<std::uint64_t> a, const std::vector<std::uint64_t>& b) {
        if (a.size() < b.size()) a.resize(b.size(), 0);
        for (std::size_t i = 0; i < b.size(); ++i) a[i] = fp_.sub(a[i], b[i]);
        return a;
    };
    wa_ = poly_sub(poly_mul(derivative(fa_), ga_), poly_mul(fa_, derivative(ga_)));

    fr_.assign(ga_.rbegin(), ga_.rend());
    gr_.assign(fa_.rbegin(), fa_.rend());
    wr_ = poly_sub(poly_mul(derivative(fr_), gr_), poly_mul(fr_, derivative(gr_)));

    denominator_constant_ = true;
    for (std::size_t i = 1; i < ga_.size(); ++i)
        if (ga_[i] != 0) denominator_constant_ = false;
    if (denominator_constant_ && ga_[0] != 0) den_const_inv_ = fp_.inv(ga_[0]);
    else denominator_constant_ = false;
}

ReducedUniMap ReducedUniMap::specialize(const IntegerUniMap& map, Prime p) {
    return ReducedUniMap(map, p);
}

namespace {
std::uint64_t horner(const std::vector<std::uint64_t>& c, std::uint64_t x, const FpCtx& fp) {
    std::uint64_t acc = 0;
    for (std::size_t i = c.size(); i-- > 0;) acc = fp.add(fp.mul(acc, x), c[i]);
    return acc;
}
}  // namespace

ProjPoint ReducedUniMap::eval(const ProjPoint& z) const {
    return point_of(step(state_of(z)));
}

std::uint64_t ReducedUniMap::step(std::uint64_t s) const {
    if (s == fp_.p) {
        // [F(1,0) : G(1,0)] = [f_d : g_d]
        std::uint64_t fd = fa_[d_], gd = ga_[d_];
        if (gd == 0) return fp_.p;
        return fp_.mul(fd, fp_.inv(gd));
    }
    std::uint64_t u = horner(fa_, s, fp_);
    if (denominator_constant_) return fp_.mul(u, den_const_inv_);
    std::uint64_t v = horner(ga_, s, fp_);
    if (v == 0) return fp_.p;
    return fp_.mul(u, fp_.inv(v));
}

bool ReducedUniMap::is_critical_state(std::uint64_t s) const {
    if (s == fp_.p) return wr_[0] == 0;
    return horner(wa_, s, fp_) == 0;
}

bool ReducedUniMap::is_critical(const ProjPoint& z) const {
    return is_critical_state(state_of(z));
}

std::vector<ProjPoint> ReducedUniMap::critical_points() const {
    std::vector<ProjPoint> out;
    for (std::uint64_t s = 0; s <= fp_.p; ++s)
        if (is_critical_state(s)) out.push_back(point_of(s));
    return out;
}

FpElement ReducedUniMap::derivative_eval(const ProjPoint& z) const {
    if (z.at_infinity) throw chart_error();
    std::uint64_t v = horner(ga_, z.x.residue, fp_);
    if (v == 0) throw chart_error();  // image is at infinity
    std::uint64_t w = horner(wa_, z.x.residue, fp_);
    std::uint64_t r = fp_.mul(w, fp_.inv(fp_.mul(v, v)));
    return FpElement(r, prime());
}

FpElement ReducedUniMap::local_derivative(const ProjPoint& z) const {
    std::uint64_t r;
    if (!z.at_infinity) {
        std::uint64_t x = z.x.residue;
        std::uint64_t v = horner(ga_, x, fp_);
        if (v != 0) {
            r = fp_.mul(horner(wa_, x, fp_), fp_.inv(fp_.mul(v, v)));
        } else {
            // target at infinity: derivative of 1/phi in the w = 1/x
            // target chart, (G/F)' = -W/F^2
            std::uint64_t u = horner(fa_, x, fp_);
            r = fp_.neg(fp_.mul(horner(wa_, x, fp_), fp_.inv(fp_.mul(u, u))));
        }
    } else {
        // source chart w = 1/x: phi(1/w) = A(w)/B(w) with A = rev(fa),
        // B = rev(ga); note fr_ = rev(ga), gr_ = rev(fa).
        const auto& A = gr_;
        const auto& B = fr_;
        std::uint64_t a0 = A[0], b0 = B[0];
        std::uint64_t a1 = A.size() > 1 ? A[1] : 0;
        std::uint64_t b1 = B.size() > 1 ? B[1] : 0;
        if (b0 != 0) {
            // target affine: (A'B - AB')(0) / B(0)^2
            std::uint64_t num = fp_.sub(fp_.mul(a1, b0), fp_.mul(a0, b1));
            r = fp_.mul(num, fp_.inv(fp_.mul(b0, b0)));
        } else {
            // target at infinity: (B'A - BA')(0) / A(0)^2
            std::uint64_t num = fp_.sub(fp_.mul(b1, a0), fp_.mul(b0, a1));
            r = fp_.mul(num, fp_.inv(fp_.mul(a0, a0)));
        }
    }
    return FpElement(r, prime());
}

std::optional<ReducedUniMap> reduce_uni(const IntegerUniMap& map, Prime p, ReduceError* why) {
    auto fail = [&](ReduceError e) -> std::optional<ReducedUniMap> {
        if (why) *why = e;
        return std::nullopt;
    };
    if (map.degree() < 2 || map.degree() >= p.value()) return fail(ReduceError::degree_vs_char);
    if (map.resultant().mod_u64(p.value()) == 0) return fail(ReduceError::bad_reduction);
    if (why) *why = ReduceError::none;
    return ReducedUniMap(map, p);
}

IntegerPolySystem::IntegerPolySystem(std::vector<MultiPoly> components)
    : components_(std::move(components)), jac_det_(1) {
    if (components_.empty()) throw std::invalid_argument("system has no components");
    dim_ = static_cast<unsigned>(components_.size());
    if (dim_ > kMaxDim) throw std::invalid_argument("dimension must be 1..4");
    degree_ = 0;
    for (const auto& f : components_) {
        if (f.dim() != dim_)
            throw std::invalid_argument("component dimension does not match system size");
        degree_ = std::max(degree_, f.total_degree());
    }
    if (degree_ > kMaxInputDegree) throw std::invalid_argument("total degree exceeds cap of 8");
    partials_.reserve(static_cast<std::size_t>(dim_) * dim_);
    for (unsigned i = 0; i < dim_; ++i)
        for (unsigned j = 0; j < dim_; ++j) partials_.push_back(components_[i].partial(j));
    jac_det_ = poly_matrix_det(partials_, dim_);
    if (jac_det_.is_constant())
        throw std::invalid_argument("Jacobian determinant is constant");
}

ReducedSystem::ReducedSystem(const IntegerPolySystem& sys, Prime p)
    : fp_(p.value()), dim_(sys.dim()), deg_(sys.degree()) {
    small_modulus_ = fp_.p < (1ull << 26);
    auto basis = monomial_basis(dim_, deg_);
    basis_size_ = basis.size();
    auto partial_basis = monomial_basis(dim_, deg_ > 0 ? deg_ - 1 : 0);
    partial_basis_size_ = partial_basis.size();

    // Predecessor DAG: each non-constant monomial is a variable times an
    // earlier monomial (graded order guarantees the predecessor exists).
    pred_idx_.assign(basis_size_, 0);
    pred_var_.assign(basis_size_, 0);
    std::map<ExpVec, std::uint32_t, GradedLexLess> index;
    for (std::size_t i = 0; i < basis_size_; ++i) index[basis[i]] = static_cast<std::uint32_t>(i);
    for (std::size_t i = 1; i < basis_size_; ++i) {
        ExpVec e = basis[i];
        unsigned v = 0;
        while (e[v] == 0) ++v;
        ExpVec prev = e;
        prev[v] -= 1;
        pred_idx_[i] = index.at(prev);
        pred_var_[i] = v;
    }

    comp_.resize(dim_);
    for (unsigned i = 0; i < dim_; ++i) {
        auto dense = sys.components()[i].dense_coeffs(deg_);
        comp_[i].resize(basis_size_);
        for (std::size_t j = 0; j < basis_size_; ++j) comp_[i][j] = fp_.from_int(dense[j]);
    }
    part_.resize(static_cast<std::size_t>(dim_) * dim_);
    for (std::size_t k = 0; k < part_.size(); ++k) {
        auto dense = sys.partials()[k].dense_coeffs(deg_ > 0 ? deg_ - 1 : 0);
        part_[k].resize(partial_basis_size_);
        for (std::size_t j = 0; j < partial_basis_size_; ++j) part_[k][j] = fp_.from_int(dense[j]);
    }
}

void ReducedSystem::monomial_values(std::span<const std::uint64_t> x, std::uint64_t* mv) const {
    mv[0] = 1 % fp_.p;
    for (std::size_t i = 1; i < basis_size_; ++i)
        mv[i] = fp_.mul(mv[pred_idx_[i]], x[pred_var_[i]]);
}

std::uint64_t ReducedSystem::dot(const std::vector<std::uint64_t>& coeffs,
                                 const std::uint64_t* mv) const {
    if (small_modulus_) {
        // products < 2^52, at most 495 terms: the sum stays below 2^61
        std::uint64_t acc = 0;
        for (std::size_t j = 0; j < coeffs.size(); ++j) acc += coeffs[j] * mv[j];
        return fp_.reduce(acc);
    }
    unsigned __int128 acc = 0;
    for (std::size_t j = 0; j < coeffs.size(); ++j)
        acc += static_cast<unsigned __int128>(coeffs[j]) * mv[j];
    std::uint64_t hi = static_cast<std::uint64_t>(acc >> 64);
    std::uint64_t lo = static_cast<std::uint64_t>(acc);
    std::uint64_t r64 = fp_.reduce(~0ull) + 1;  // 2^64 mod p
    if (r64 == fp_.p) r64 = 0;
    return fp_.reduce(fp_.reduce(lo) + fp_.mul(fp_.reduce(hi), r64));
}

void ReducedSystem::eval(std::span<const std::uint64_t> x, std::span<std::uint64_t> out) const {
    if (x.size() != dim_ || out.size() != dim_)
        throw std::invalid_argument("vector length does not match system dimension");
    std::uint64_t mv[512];
    monomial_values(x, mv);
    for (unsigned i = 0; i < dim_; ++i) out[i] = dot(comp_[i], mv);
}

std::vector<FpElement> ReducedSystem::eval(std::span<const FpElement> x) const {
    if (x.size() != dim_) throw std::invalid_argument("vector length does not match system dimension");
    std::vector<std::uint64_t> in(dim_), raw(dim_);
    for (unsigned i = 0; i < dim_; ++i) {
        if (x[i].modulus != fp_.p) throw modulus_mismatch();
        in[i] = x[i].residue;
    }
    eval(in, raw);
    std::vector<FpElement> out(dim_);
    for (unsigned i = 0; i < dim_; ++i) out[i] = FpElement(raw[i], prime());
    return out;
}

std::uint64_t ReducedSystem::jacobian_det(std::span<const std::uint64_t> x) const {
    if (x.size() != dim_) throw std::invalid_argument("vector length does not match system dimension");
    std::uint64_t mv[512];
    mv[0] = 1 % fp_.p;
    for (std::size_t i = 1; i < partial_basis_size_; ++i)
        mv[i] = fp_.mul(mv[pred_idx_[i]], x[pred_var_[i]]);
    std::uint64_t m[kMaxDim][kMaxDim];
    for (unsigned i = 0; i < dim_; ++i)
        for (unsigned j = 0; j < dim_; ++j)
            m[i][j] = dot(part_[static_cast<std::size_t>(i) * dim_ + j], mv);
    switch (dim_) {
        case 1:
            return m[0][0];
        case 2:
            return fp_.sub(fp_.mul(m[0][0], m[1][1]), fp_.mul(m[0][1], m[1][0]));
        case 3: {
            std::uint64_t c0 = fp_.sub(fp_.mul(m[1][1], m[2][2]), fp_.mul(m[1][2], m[2][1]));
            std::uint64_t c1 = fp_.sub(fp_.mul(m[1][0], m[2][2]), fp_.mul(m[1][2], m[2][0]));
            std::uint64_t c2 = fp_.sub(fp_.mul(m[1][0], m[2][1]), fp_.mul(m[1][1], m[2][0]));
            std::uint64_t det = fp_.mul(m[0][0], c0);
            det = fp_.sub(det, fp_.mul(m[0][1], c1));
            return fp_.add(det, fp_.mul(m[0][2], c2));
        }
        default: {
            std::uint64_t det = 0;
            for (unsigned c = 0; c < 4; ++c) {
                std::uint64_t sub[3][3];
                for (unsigned r = 1; r < 4; ++r) {
                    unsigned cc = 0;
                    for (unsigned k = 0; k < 4; ++k)
                        if (k != c) sub[r - 1][cc++] = m[r][k];
                }
                std::uint64_t d0 = fp_.sub(fp_.mul(sub[1][1], sub[2][2]), fp_.mul(sub[1][2], sub[2][1]));
                std::uint64_t d1 = fp_.sub(fp_.mul(sub[1][0], sub[2][2]), fp_.mul(sub[1][2], sub[2][0]));
                std::uint64_t d2 = fp_.sub(fp_.mul(sub[1][0], sub[2][1]), fp_.mul(sub[1][1], sub[2][0]));
                std::uint64_t minor = fp_.mul(sub[0][0], d0);
                minor = fp_.sub(minor, fp_.mul(sub[0][1], d1));
                minor = fp_.add(minor, fp_.mul(sub[0][2], d2));
                std::uint64_t term = fp_.mul(m[0][c], minor);
                det = (c % 2 == 0) ? fp_.add(det, term) : fp_.sub(det, term);
            }
            return det;
        }
    }
}

FpElement ReducedSystem::jacobian_det(std::span<const FpElement> x) const {
    std::vector<std::uint64_t> in(dim_);
    for (unsigned i = 0; i < dim_; ++i) {
        if (x[i].modulus != fp_.p) throw modulus_mismatch();
        in[i] = x[i].residue;
    }
    return FpElement(jacobian_det(std::span<const std::uint64_t>(in)), prime());
}

std::optional<ReducedSystem> reduce_sys(const IntegerPolySystem& sys, Prime p, ReduceError* why) {
    auto fail = [&](ReduceError e) -> std::optional<ReducedSystem> {
        if (why) *why = e;
        return std::nullopt;
    };
    if (p.value() <= sys.degree()) return fail(ReduceError::degree_vs_char);
    bool nonconstant = false;
    for (const auto& [e, c] : sys.jacobian_det_poly().terms()) {
        if (exp_total(e) >= 1 && c % static_cast<std::int64_t>(p.value()) != 0) {
            nonconstant = true;
            break;
        }
    }
    if (!nonconstant) return fail(ReduceError::degenerate_jacobian);
    if (why) *why = ReduceError::none;
    return ReducedSystem(sys, p);
}

}  // namespace fforbit
