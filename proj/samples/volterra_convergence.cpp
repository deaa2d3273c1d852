// Relative commutation residual of the grid-aligned composition witness
// against V_N, for several lambda. The residual decays like 1/N.
#include <xeig/volterra.hpp>

#include <cstdio>

int main() {
  const std::vector<xeig::Index> grids{16, 32, 64, 128, 256};
  for (const xeig::Rational lambda : {xeig::Rational(1, 2), xeig::Rational(1, 4), xeig::Rational(2), xeig::Rational(4)}) {
    const auto e = xeig::volterra_membership_evidence(lambda, grids);
    std::printf("lambda=%-4s", xeig::to_string(lambda).c_str());
    for (const auto& [n, r] : e.residuals) std::printf("  N=%-3ld %.3e", static_cast<long>(n), r);
    std::printf("  order %.3f\n", e.convergence_order.value_or(0.0));
  }
}
