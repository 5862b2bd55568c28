#include "cournotlre/util.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

namespace cournot {

std::string dec_string(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::optional<std::string> rational_string(double v) {
  if (!std::isfinite(v)) return std::nullopt;
  // Continued-fraction expansion with bounded denominator.
  double x = v;
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int it = 0; it < 64; ++it) {
    double a = std::floor(x);
    long long ai = static_cast<long long>(a);
    long long p2 = ai * p1 + p0;
    long long q2 = ai * q1 + q0;
    if (q2 > 10000 || q2 < 0) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    if (std::abs(v - static_cast<double>(p1) / q1) < 1e-9) {
      if (q1 == 1) return std::to_string(p1);
      return std::to_string(p1) + "/" + std::to_string(q1);
    }
    double frac = x - a;
    if (frac < 1e-12) break;
    x = 1.0 / frac;
  }
  return std::nullopt;
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace cournot
