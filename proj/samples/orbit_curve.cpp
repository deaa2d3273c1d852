// How close random conjugates of diag(1,2,4) come to diag(1,2,5) as the
// sample count grows. The distance stays bounded away from zero.
#include <xeig/matrix_sigma.hpp>

#include <cstdio>

namespace {
xeig::DenseOperator diag(std::initializer_list<int> d) {
  xeig::RationalMatrix m(static_cast<xeig::Index>(d.size()), static_cast<xeig::Index>(d.size()));
  xeig::Index i = 0;
  for (int x : d) { m(i, i) = x; ++i; }
  return xeig::DenseOperator(std::move(m));
}
}  // namespace

int main() {
  const auto r = xeig::orbit_distance(diag({1, 2, 4}), diag({1, 2, 5}), 256, 10.0, 2024);
  std::printf("permutations only: %.6f\n", r.deterministic);
  for (std::size_t i = 0; i < r.curve.size(); i = i ? 2 * i + 1 : 1) std::printf("samples %4zu: %.6f\n", i + 1, r.curve[i]);
  std::printf("best: %.6f\n", r.distance);
}
