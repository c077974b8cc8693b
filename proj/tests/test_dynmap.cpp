#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "fforbit/dynmap.hpp"
#include "fforbit/experiments.hpp"
#include "fforbit/rng.hpp"

using namespace fforbit;

namespace {

ProjPoint aff(std::uint64_t v, Prime p) { return ProjPoint::affine(FpElement(v, p)); }

// Test-side evaluator for symbolic polynomials mod p, independent of
// the dense table path in ReducedSystem.
std::uint64_t eval_poly_mod(const MultiPoly& f, std::span<const std::uint64_t> x, const FpCtx& fp) {
    std::uint64_t acc = 0;
    for (const auto& [e, c] : f.terms()) {
        std::uint64_t term = fp.from_int(c);
        for (unsigned v = 0; v < f.dim(); ++v) term = fp.mul(term, fp.pow(x[v], e[v]));
        acc = fp.add(acc, term);
    }
    return acc;
}

}  // namespace

TEST_CASE("BigInt arithmetic sanity") {
    BigInt b(1);
    for (int i = 0; i < 4; ++i) b.mul_u64(1ull << 50);
    FpCtx fp(1000003);
    CHECK(b.mod_u64(1000003) == fp.pow(2, 200));
    BigInt neg(-8);
    CHECK(neg.mod_u64(97) == 97 - 8);
    CHECK(BigInt(-8).to_string() == "-8");
    CHECK(BigInt(0).to_string() == "0");
    BigInt sum(5);
    sum += BigInt(-9);
    CHECK(sum.to_string() == "-4");
}

TEST_CASE("formal resultants") {
    // polynomial map: Res(F, Y^d) = lc(F)^d
    std::vector<std::int64_t> f{2, 1, 1}, one{1};
    auto r = resultant_formal(f, 2, one, 2);
    CHECK_FALSE(r.is_zero());
    CHECK(r.mod_u64(101) == 1);

    std::vector<std::int64_t> g3{1, 0, 3};  // 3x^2 + 1
    auto r3 = resultant_formal(g3, 2, one, 2);
    CHECK(r3.mod_u64(3) == 0);
    CHECK(r3.mod_u64(101) == 9 % 101);

    // discriminant-style: Res(x^2 - 2, 2x) = -8
    std::vector<std::int64_t> q{-2, 0, 1}, dq{0, 2};
    auto disc = resultant_formal(q, 2, dq, 1);
    CHECK(disc.mod_u64(1000003) == 1000003 - 8);

    // non-squarefree: Res(x^2, 2x) = 0
    std::vector<std::int64_t> x2{0, 0, 1}, dx2{0, 2};
    CHECK(resultant_formal(x2, 2, dx2, 1).is_zero());
}

TEST_CASE("IntegerUniMap validation") {
    CHECK(IntegerUniMap({2, 1, 1}).degree() == 2);
    CHECK(IntegerUniMap({1, 0, 0, 1}).degree() == 3);
    CHECK(IntegerUniMap({0, 1}, {1, 1}).degree() == 1);  // x/(1+x)
    // common factor x-1 between numerator and denominator
    CHECK_THROWS_AS(IntegerUniMap({-1, 0, 1}, {-1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(IntegerUniMap({5}), std::invalid_argument);  // constant
    // content is normalized away
    IntegerUniMap scaled({4, 2, 2}, {2});
    CHECK(scaled.num() == std::vector<std::int64_t>{2, 1, 1});
    CHECK(scaled.den() == std::vector<std::int64_t>{1});
}

TEST_CASE("reduce_uni gate") {
    IntegerUniMap f({2, 1, 1});  // x^2 + x + 2
    ReduceError why;

    CHECK(reduce_uni(f, Prime(5), &why).has_value());
    CHECK(why == ReduceError::none);

    IntegerUniMap cube({1, 0, 0, 1});  // x^3 + 1
    CHECK_FALSE(reduce_uni(cube, Prime(3), &why).has_value());
    CHECK(why == ReduceError::degree_vs_char);

    CHECK_FALSE(reduce_uni(f, Prime(2), &why).has_value());
    CHECK(why == ReduceError::degree_vs_char);

    IntegerUniMap bad_lead({1, 0, 3});  // 3x^2 + 1
    CHECK_FALSE(reduce_uni(bad_lead, Prime(3), &why).has_value());
    CHECK(why == ReduceError::bad_reduction);
    CHECK(reduce_uni(bad_lead, Prime(5), &why).has_value());

    // degree-1 maps sit outside the sweep regime
    IntegerUniMap inv({1}, {0, 1});
    CHECK_FALSE(reduce_uni(inv, Prime(5), &why).has_value());
    CHECK(why == ReduceError::degree_vs_char);
}

TEST_CASE("eval_uni") {
    Prime p5(5);
    auto f = reduce_uni(IntegerUniMap({2, 1, 1}), p5).value();
    CHECK(f.eval(aff(1, p5)) == aff(4, p5));
    CHECK(f.eval(ProjPoint::infinity(p5)) == ProjPoint::infinity(p5));

    // 1/x swaps 0 and infinity
    auto inv = ReducedUniMap::specialize(IntegerUniMap({1}, {0, 1}), p5);
    CHECK(inv.eval(aff(0, p5)) == ProjPoint::infinity(p5));
    CHECK(inv.eval(ProjPoint::infinity(p5)) == aff(0, p5));
    CHECK(inv.eval(aff(2, p5)) == aff(3, p5));  // 1/2 = 3 mod 5
}

TEST_CASE("critical points and derivatives") {
    Prime p7(7), p5(5);

    auto sq = reduce_uni(IntegerUniMap({0, 0, 1}), p7).value();  // x^2
    CHECK(sq.is_critical(aff(0, p7)));
    CHECK(sq.is_critical(ProjPoint::infinity(p7)));
    CHECK_FALSE(sq.is_critical(aff(1, p7)));

    auto f = reduce_uni(IntegerUniMap({2, 1, 1}), p5).value();
    CHECK(f.is_critical(aff(2, p5)));  // 2x+1 = 0 at x=2
    auto crit = f.critical_points();
    REQUIRE(crit.size() == 2);
    CHECK(crit[0] == aff(2, p5));
    CHECK(crit[1] == ProjPoint::infinity(p5));

    auto cube = reduce_uni(IntegerUniMap({0, 0, 0, 1}), p7).value();  // x^3
    auto crit3 = cube.critical_points();
    REQUIRE(crit3.size() == 2);
    CHECK(crit3[0] == aff(0, p7));
    CHECK(crit3[1] == ProjPoint::infinity(p7));

    // Newton map of x^2 - 2: critical exactly at the square roots of 2
    auto newton = reduce_uni(newton_map(std::vector<std::int64_t>{-2, 0, 1}), p7).value();
    auto critn = newton.critical_points();
    REQUIRE(critn.size() == 2);
    CHECK(critn[0] == aff(3, p7));
    CHECK(critn[1] == aff(4, p7));

    CHECK(sq.derivative_eval(aff(2, p7)).residue == 4);
    CHECK(f.derivative_eval(aff(1, p5)).residue == 3);
    // quotient rule value at 1: ((2x^2) - (x^2+2)*2) / (2x)^2 = -1/2 = 3 mod 7
    CHECK(newton.derivative_eval(aff(1, p7)).residue == 3);
    CHECK_THROWS_AS(sq.derivative_eval(ProjPoint::infinity(p7)), chart_error);
    auto inv = ReducedUniMap::specialize(IntegerUniMap({1}, {0, 1}), p7);
    CHECK_THROWS_AS(inv.derivative_eval(aff(0, p7)), chart_error);
}

TEST_CASE("critical point count obeys the 2d-2 bound, criticality matches membership") {
    std::vector<IntegerUniMap> maps;
    maps.emplace_back(std::vector<std::int64_t>{2, 1, 1});
    maps.emplace_back(std::vector<std::int64_t>{1, 0, 0, 1});
    maps.push_back(newton_map(std::vector<std::int64_t>{-2, 0, 1}));
    for (const auto& m : maps) {
        for (const auto& p : primes_below(200)) {
            auto rm = reduce_uni(m, p);
            if (!rm) continue;
            auto crit = rm->critical_points();
            CHECK(crit.size() <= 2 * rm->degree() - 2);
            std::size_t found = 0;
            for (std::uint64_t s = 0; s <= p.value(); ++s)
                if (rm->is_critical_state(s)) ++found;
            CHECK(found == crit.size());
            for (const auto& z : crit) CHECK(rm->is_critical(z));
        }
    }
}

TEST_CASE("reduction commutes with exact rational evaluation") {
    rng::Stream stream(99, 1);
    const std::vector<Prime> primes{Prime(7), Prime(11), Prime(101), Prime(449)};
    int checked = 0;
    while (checked < 300) {
        std::vector<std::int64_t> num(3), den(3);
        for (auto& c : num) c = stream.uniform_int(-5, 5);
        for (auto& c : den) c = stream.uniform_int(-5, 5);
        std::int64_t z = stream.uniform_int(-10, 10);
        std::optional<IntegerUniMap> maybe;
        try {
            maybe.emplace(num, den);
        } catch (const std::invalid_argument&) {
            continue;
        }
        const IntegerUniMap& m = *maybe;
        for (const auto& p : primes) {
            auto rm = reduce_uni(m, p);
            if (!rm) continue;
            // exact evaluation over Q: F(z), G(z) as integers, reduced
            // to lowest terms before the reduction map
            auto horner_int = [&](const std::vector<std::int64_t>& c) {
                std::int64_t acc = 0;
                for (std::size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
                return acc;
            };
            std::int64_t fz = horner_int(m.num()), gz = horner_int(m.den());
            if (fz == 0 && gz == 0) continue;  // z is a common root mod nothing
            std::int64_t g = std::gcd(fz, gz);
            if (g != 0) { fz /= g; gz /= g; }
            FpCtx fp(p.value());
            ProjPoint expected = fp.from_int(gz) == 0
                                     ? ProjPoint::infinity(p)
                                     : aff(fp.mul(fp.from_int(fz), fp.inv(fp.from_int(gz))), p);
            ProjPoint got = rm->eval(aff(fp.from_int(z), p));
            CHECK(got == expected);
            ++checked;
        }
    }
}

TEST_CASE("IntegerPolySystem validation") {
    auto x = [](unsigned d, unsigned v) { return MultiPoly::variable(d, v); };
    // x -> x + 1 has constant Jacobian
    {
        std::vector<MultiPoly> comps{x(1, 0) + MultiPoly::constant(1, 1)};
        CHECK_THROWS_AS(IntegerPolySystem(std::move(comps)), std::invalid_argument);
    }
    // mismatched dimension
    {
        std::vector<MultiPoly> comps{x(2, 0)};
        CHECK_THROWS_AS(IntegerPolySystem(std::move(comps)), std::invalid_argument);
    }
    // valid quadratic
    {
        std::vector<MultiPoly> comps{x(1, 0) * x(1, 0)};
        IntegerPolySystem sys(std::move(comps));
        CHECK(sys.dim() == 1);
        CHECK(sys.degree() == 2);
    }
}

TEST_CASE("reduce_sys gate") {
    auto any_map = builtin_map("dim3");
    const auto& sys = std::get<IntegerPolySystem>(any_map);
    ReduceError why;
    CHECK(reduce_sys(sys, Prime(101), &why).has_value());
    CHECK(reduce_sys(sys, Prime(20011), &why).has_value());
    CHECK_FALSE(reduce_sys(sys, Prime(2), &why).has_value());
    CHECK(why == ReduceError::degree_vs_char);

    // Jacobian det 1 - 4 x1 x2 degenerates mod 2... p=2 is already out;
    // build det = 3 x1 + 3 x2 + 1 style system degenerating mod 3:
    // f = (x1^2 + x1, x1 x2): partials [[2x1+1, 0], [x2, x1]],
    // det = 2x1^2 + x1, degenerate only where 2 = 0 and 1 = 0: never.
    // Use f = (x1 + 3 x1 x2, x2): det = 1 + 3 x2, constant mod 3.
    auto x = [](unsigned d, unsigned v) { return MultiPoly::variable(d, v); };
    std::vector<MultiPoly> comps{
        x(2, 0) + MultiPoly::constant(2, 3) * x(2, 0) * x(2, 1), x(2, 1)};
    IntegerPolySystem degen(std::move(comps));
    CHECK_FALSE(reduce_sys(degen, Prime(3), &why).has_value());
    CHECK(why == ReduceError::degenerate_jacobian);
    CHECK(reduce_sys(degen, Prime(5), &why).has_value());
}

TEST_CASE("eval_sys") {
    auto any_map = builtin_map("dim3");
    const auto& sys = std::get<IntegerPolySystem>(any_map);
    Prime p(101);
    auto rs = reduce_sys(sys, p).value();
    std::vector<FpElement> origin{FpElement(0, p), FpElement(0, p), FpElement(0, p)};
    auto out = rs.eval(origin);
    REQUIRE(out.size() == 3);
    CHECK(out[0].residue == 11);
    CHECK(out[1].residue == 7);
    CHECK(out[2].residue == 121 % 101);

    CHECK_THROWS_AS(rs.eval(std::vector<FpElement>{FpElement(0, p)}), std::invalid_argument);

    // zero polynomial evaluates to zero through the dense tables
    FpCtx fp(101);
    std::uint64_t pt[2] = {17, 42};
    CHECK(eval_poly_mod(MultiPoly(2), pt, fp) == 0);

    // toy quadratic, hand arithmetic: (x1 + x2^2, x1^2 + x2) at (2,3) mod 5
    auto x = [](unsigned d, unsigned v) { return MultiPoly::variable(d, v); };
    std::vector<MultiPoly> comps{x(2, 0) + x(2, 1) * x(2, 1), x(2, 0) * x(2, 0) + x(2, 1)};
    IntegerPolySystem toy(std::move(comps));
    auto rt = reduce_sys(toy, Prime(5)).value();
    SysState s{2, 3, 0, 0};
    auto next = rt.step(s);
    CHECK(next[0] == 1);  // 2 + 9 = 11
    CHECK(next[1] == 2);  // 4 + 3 = 7
}

TEST_CASE("jacobian determinant") {
    auto any_map = builtin_map("dim3");
    const auto& sys = std::get<IntegerPolySystem>(any_map);
    Prime p(101);
    auto rs = reduce_sys(sys, p).value();
    std::uint64_t origin[3] = {0, 0, 0};
    // linear-term coefficient matrix [[7,8,9],[1,8,3],[2,8,5]], det 48
    CHECK(rs.jacobian_det(origin) == 48);

    // d=1, f = x^2: det = 2x vanishes at 0
    std::vector<MultiPoly> sq{MultiPoly::variable(1, 0) * MultiPoly::variable(1, 0)};
    auto r1 = reduce_sys(IntegerPolySystem(std::move(sq)), Prime(7)).value();
    std::uint64_t zero[1] = {0};
    CHECK(r1.jacobian_det(zero) == 0);
    std::uint64_t three[1] = {3};
    CHECK(r1.jacobian_det(three) == 6);

    // proportional rows: f = (x1 x2, x1 x2 + x1) has det -x1
    auto x = [](unsigned d, unsigned v) { return MultiPoly::variable(d, v); };
    std::vector<MultiPoly> dep{x(2, 0) * x(2, 1), x(2, 0) * x(2, 1) + x(2, 0)};
    auto r2 = reduce_sys(IntegerPolySystem(std::move(dep)), Prime(11)).value();
    std::uint64_t at[2] = {0, 5};
    CHECK(r2.jacobian_det(at) == 0);
}

TEST_CASE("jacobian_det equals the symbolic determinant at random points") {
    auto any_map = builtin_map("dim3");
    const auto& sys = std::get<IntegerPolySystem>(any_map);
    const auto& det_poly = sys.jacobian_det_poly();
    rng::Stream stream(5, 5);
    for (const auto& p : {Prime(101), Prime(4999), Prime(65537)}) {
        auto rs = reduce_sys(sys, p).value();
        FpCtx fp(p.value());
        for (int t = 0; t < 334; ++t) {
            std::uint64_t x[3] = {stream.below(p.value()), stream.below(p.value()),
                                  stream.below(p.value())};
            CHECK(rs.jacobian_det(std::span<const std::uint64_t>(x, 3)) ==
                  eval_poly_mod(det_poly, std::span<const std::uint64_t>(x, 3), fp));
        }
    }
}

TEST_CASE("system evaluation matches the symbolic components at random points") {
    auto any_map = builtin_map("dim3");
    const auto& sys = std::get<IntegerPolySystem>(any_map);
    rng::Stream stream(6, 6);
    Prime p(99991);
    auto rs = reduce_sys(sys, p).value();
    FpCtx fp(p.value());
    for (int t = 0; t < 200; ++t) {
        std::uint64_t x[3] = {stream.below(p.value()), stream.below(p.value()),
                              stream.below(p.value())};
        std::uint64_t out[3];
        rs.eval(std::span<const std::uint64_t>(x, 3), std::span<std::uint64_t>(out, 3));
        for (unsigned i = 0; i < 3; ++i)
            CHECK(out[i] == eval_poly_mod(sys.components()[i],
                                          std::span<const std::uint64_t>(x, 3), fp));
    }
}
