// Scans moduli for a few weight families and prints where lambda enters
// Sigma(T), next to the annulus computed from the tails.
#include <xeig/shift_sigma.hpp>

#include <cstdio>

int main() {
  const char* families[] = {"powerlaw:alpha=1", "exptail:pos=1/2,neg=1/2", "exptail:pos=1/2,neg=1/4",
                            "piecewise:split=1,neg=[constant:r=1],pos=[exptail:pos=1/2,neg=1]"};
  for (const char* text : families) {
    const auto f = xeig::parse_family(text);
    const auto a = xeig::annulus(f, 20);
    std::printf("%s\n  annulus c=%s d=%s (%s)\n  ", text, a.c.str().c_str(), a.d.str().c_str(), a.shape().c_str());
    for (int i = -8; i <= 8; ++i) {
      const xeig::Rational r = i < 0 ? xeig::Rational(1, 1 << -i) : xeig::Rational(1 << i);
      const auto v = xeig::shift_membership(f, xeig::ComplexScalar::exact(r));
      std::putchar(v.status == xeig::Status::In ? '#' : '.');
    }
    std::printf("   moduli 2^-8 .. 2^8\n");
  }
}
