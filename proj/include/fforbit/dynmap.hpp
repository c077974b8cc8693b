#pragma once

// Maps with integer coefficients and their mod-p specializations.
//
// A univariate map is a pair of integer coefficient lists (numerator,
// denominator) read as a homogeneous pair [F(X,Y) : G(X,Y)] of common
// degree d = max(deg F, deg G). Reduction mod p succeeds when the
// integer resultant Res(F, G) stays nonzero mod p and 2 <= d < p; the
// reduced map is then a degree-d morphism of P^1(F_p) and every
// operation on it (evaluation, criticality, derivatives) is total on
// the chart it documents.
//
// A polynomial system is a tuple of multivariate integer polynomials
// acting on A^d; its reduction carries dense evaluation tables and the
// mod-p Jacobian partials.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fforbit/bigint.hpp"
#include "fforbit/ffield.hpp"
#include "fforbit/poly.hpp"

namespace fforbit {

enum class ReduceError {
    none,
    bad_reduction,        // resultant vanishes mod p
    degree_vs_char,       // degree outside [2, p) (univariate) or p <= total degree (system)
    degenerate_jacobian,  // Jacobian determinant constant mod p
};

struct chart_error : std::domain_error {
    chart_error() : std::domain_error("point at infinity requires a coordinate swap") {}
};

// Resultant of two integer polynomials taken at the formal degrees
// (da, db), i.e. of the homogenizations to those degrees. Exact, via
// CRT over word-size primes against the Hadamard bound.
BigInt resultant_formal(std::span<const std::int64_t> a, unsigned da,
                        std::span<const std::int64_t> b, unsigned db);

class IntegerUniMap {
public:
    // Affine coefficient lists, ascending degree. den defaults to 1.
    explicit IntegerUniMap(std::vector<std::int64_t> num,
                           std::vector<std::int64_t> den = {1});

    unsigned degree() const { return degree_; }
    const std::vector<std::int64_t>& num() const { return num_; }
    const std::vector<std::int64_t>& den() const { return den_; }
    bool is_polynomial() const { return den_.size() == 1; }
    const BigInt& resultant() const { return resultant_; }

private:
    std::vector<std::int64_t> num_, den_;  // content-normalized, no trailing zeros
    unsigned degree_;
    BigInt resultant_;
};

// Point of P^1(F_p) in canonical form: affine (x : 1) or (1 : 0).
struct ProjPoint {
    FpElement x{};
    bool at_infinity = false;

    static ProjPoint affine(FpElement v) { return ProjPoint{v, false}; }
    static ProjPoint infinity(Prime p) { return ProjPoint{FpElement(0, p), true}; }
    friend bool operator==(const ProjPoint& a, const ProjPoint& b) {
        if (a.at_infinity != b.at_infinity) return false;
        return a.at_infinity ? a.x.modulus == b.x.modulus : a.x == b.x;
    }
};

class ReducedUniMap {
public:
    std::uint32_t modulus() const { return static_cast<std::uint32_t>(fp_.p); }
    unsigned degree() const { return d_; }
    const FpCtx& fp() const { return fp_; }

    ProjPoint eval(const ProjPoint& z) const;
    bool is_critical(const ProjPoint& z) const;
    std::vector<ProjPoint> critical_points() const;  // exhaustive scan of p+1 points

    // Affine derivative W(z)/G(z)^2; requires z and eval(z) affine.
    FpElement derivative_eval(const ProjPoint& z) const;

    // Chart-aware derivative used for multipliers: identity chart at
    // affine points, w = 1/x at infinity, on both source and target.
    FpElement local_derivative(const ProjPoint& z) const;

    // Orbit-state interface: states 0..p-1 are affine, state p is the
    // point at infinity.
    std::uint64_t state_count() const { return fp_.p + 1; }
    std::uint64_t state_of(const ProjPoint& z) const {
        return z.at_infinity ? fp_.p : z.x.residue;
    }
    ProjPoint point_of(std::uint64_t s) const {
        return s == fp_.p ? ProjPoint::infinity(prime()) : ProjPoint::affine(FpElement(s, prime()));
    }
    std::uint64_t step(std::uint64_t s) const;
    bool is_critical_state(std::uint64_t s) const;

    Prime prime() const { return Prime::unchecked(static_cast<std::uint32_t>(fp_.p)); }

    // Directly specialize coefficient lists mod p without the good
    // reduction gate (degree >= 1 suffices). Used for evaluation of
    // maps outside the sweep regime; sweeps go through reduce_uni.
    static ReducedUniMap specialize(const IntegerUniMap& map, Prime p);

private:
    friend std::optional<ReducedUniMap> reduce_uni(const IntegerUniMap&, Prime, ReduceError*);
    ReducedUniMap(const IntegerUniMap& map, Prime p);

    FpCtx fp_;
    unsigned d_ = 0;
    std::vector<std::uint64_t> fa_, ga_;  // homogeneous coefficient lists, length d+1
    std::vector<std::uint64_t> wa_;       // affine-chart Wronskian fa' ga - fa ga'
    std::vector<std::uint64_t> fr_, gr_;  // swapped chart: fr = rev(ga), gr = rev(fa)
    std::vector<std::uint64_t> wr_;       // swapped-chart Wronskian
    bool denominator_constant_ = false;
    std::uint64_t den_const_inv_ = 0;     // inverse of ga when constant
};

// Good-reduction gate: succeeds iff Res(F,G) != 0 mod p and 2 <= d < p.
std::optional<ReducedUniMap> reduce_uni(const IntegerUniMap& map, Prime p,
                                        ReduceError* why = nullptr);

class IntegerPolySystem {
public:
    // Components of matching dimension, total degree <= 8; the symbolic
    // Jacobian determinant must be non-constant.
    explicit IntegerPolySystem(std::vector<MultiPoly> components);

    unsigned dim() const { return dim_; }
    unsigned degree() const { return degree_; }  // max component total degree
    const std::vector<MultiPoly>& components() const { return components_; }
    const std::vector<MultiPoly>& partials() const { return partials_; }  // row-major d x d
    const MultiPoly& jacobian_det_poly() const { return jac_det_; }

private:
    std::vector<MultiPoly> components_;
    std::vector<MultiPoly> partials_;
    MultiPoly jac_det_;
    unsigned dim_;
    unsigned degree_;
};

using SysState = std::array<std::uint64_t, kMaxDim>;

class ReducedSystem {
public:
    std::uint32_t modulus() const { return static_cast<std::uint32_t>(fp_.p); }
    unsigned dim() const { return dim_; }
    const FpCtx& fp() const { return fp_; }
    Prime prime() const { return Prime::unchecked(static_cast<std::uint32_t>(fp_.p)); }

    void eval(std::span<const std::uint64_t> x, std::span<std::uint64_t> out) const;
    std::vector<FpElement> eval(std::span<const FpElement> x) const;

    // det of the Jacobian matrix of mod-p partials at x (cofactor
    // expansion, division free).
    std::uint64_t jacobian_det(std::span<const std::uint64_t> x) const;
    FpElement jacobian_det(std::span<const FpElement> x) const;

    SysState step(const SysState& s) const {
        SysState out{};
        eval(std::span<const std::uint64_t>(s.data(), dim_), std::span<std::uint64_t>(out.data(), dim_));
        return out;
    }
    bool jacobian_vanishes(const SysState& s) const {
        return jacobian_det(std::span<const std::uint64_t>(s.data(), dim_)) == 0;
    }

private:
    friend std::optional<ReducedSystem> reduce_sys(const IntegerPolySystem&, Prime, ReduceError*);
    ReducedSystem(const IntegerPolySystem& sys, Prime p);

    // Evaluate every basis monomial at x into mv (incremental products
    // over the predecessor DAG).
    void monomial_values(std::span<const std::uint64_t> x, std::uint64_t* mv) const;
    std::uint64_t dot(const std::vector<std::uint64_t>& coeffs, const std::uint64_t* mv) const;

    FpCtx fp_;
    unsigned dim_ = 0;
    unsigned deg_ = 0;
    bool small_modulus_ = false;  // p < 2^26: dot products accumulate unreduced
    std::size_t basis_size_ = 0;
    std::size_t partial_basis_size_ = 0;  // prefix of the basis up to deg-1
    std::vector<std::uint32_t> pred_idx_, pred_var_;
    std::vector<std::vector<std::uint64_t>> comp_;  // [dim][basis_size]
    std::vector<std::vector<std::uint64_t>> part_;  // [dim*dim][partial_basis_size]
};

// Succeeds iff p > total degree and the Jacobian determinant stays
// non-constant mod p.
std::optional<ReducedSystem> reduce_sys(const IntegerPolySystem& sys, Prime p,
                                        ReduceError* why = nullptr);

}  // namespace fforbit
