// Integer block geometry for a wedge and its containment check.

#include <cstdio>

#include "wedgecp/blocks.hpp"

using namespace wedgecp;

int main(int argc, char** argv) {
  const Rational alpha = argc > 1 ? Rational::parse(argv[1]) : Rational(2);
  const Rational al = argc > 2 ? Rational::parse(argv[2]) : Rational(1, 2);
  const Rational ar = argc > 3 ? Rational::parse(argv[3]) : Rational(1);
  const IntegerSolution s = solve_integer_wedge(alpha, al, ar);
  std::printf("m=%lld c=%lld beta=%s ell'=%lld d'=%lld\n", static_cast<long long>(s.m), static_cast<long long>(s.c),
              s.beta.str().c_str(), static_cast<long long>(s.ell_prime), static_cast<long long>(s.d_prime));
  const ContainmentReport rep = verify_containment(s, al, ar, 100, 20);
  std::printf("containment over %lld rows: %s (%s)\n", static_cast<long long>(rep.rows), rep.passed ? "ok" : "fails",
              rep.message.c_str());
  return rep.passed ? 0 : 1;
}
