#include "fforbit/orbit.hpp"

namespace fforbit {

FpElement cycle_multiplier(const ReducedUniMap& m, const ProjPoint& x0,
                           const OrbitSummary& summary) {
    std::uint64_t z = m.state_of(x0);
    for (std::uint64_t i = 0; i < summary.preperiod; ++i) z = m.step(z);
    FpCtx fp(m.modulus());
    std::uint64_t acc = 1 % fp.p;
    for (std::uint64_t i = 0; i < summary.cycle_len; ++i) {
        acc = fp.mul(acc, m.local_derivative(m.point_of(z)).residue);
        z = m.step(z);
    }
    return FpElement(acc, m.prime());
}

}  // namespace fforbit
