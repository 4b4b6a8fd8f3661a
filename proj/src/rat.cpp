#include "haardy/rat.hpp"

#include <cmath>
#include <stdexcept>

#include "haardy/err.hpp"

namespace haardy {

Rat rat_from_double(double x) {
  if (!std::isfinite(x)) throw DomainError("non-finite value has no rational form");
  Rat r;
  mpq_set_d(r.get_mpq_t(), x);
  return r;
}

double rat_to_double(const Rat& x) { return x.get_d(); }

Rat rat_parse(const std::string& s) {
  if (s.empty()) throw DomainError("empty rational literal");
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    // decimal literal: shift the point out
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    size_t frac = s.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+")
      throw DomainError("bad decimal literal: " + s);
    try {
      Rat num(digits, 10);
      Rat den = 1;
      for (size_t k = 0; k < frac; k++) den *= 10;
      Rat r = num / den;
      r.canonicalize();
      return r;
    } catch (const std::invalid_argument&) {
      throw DomainError("bad decimal literal: " + s);
    }
  }
  try {
    Rat r(s, 10);
    if (r.get_den() == 0) throw DomainError("zero denominator: " + s);
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    throw DomainError("bad rational literal: " + s);
  }
}

std::string rat_str(const Rat& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

Rat rat_pow(const Rat& base, unsigned long e) {
  Rat out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), e);
  out.canonicalize();
  return out;
}

Rat dyadic_measure(uint32_t j) {
  Rat den = 1;
  mpz_mul_2exp(den.get_num_mpz_t(), den.get_num_mpz_t(), j);
  return Rat(1) / den;
}

double rat_root(const Rat& x, unsigned long k) {
  if (x < 0) throw DomainError("root of negative value");
  if (k == 0) throw DomainError("zeroth root");
  if (k == 1) return x.get_d();
  return std::pow(x.get_d(), 1.0 / double(k));
}

}  // namespace haardy
