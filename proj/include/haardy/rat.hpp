#ifndef HAARDY_RAT_HPP
#define HAARDY_RAT_HPP

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace haardy {

using Rat = mpq_class;

inline Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

// Exact value of a finite double (every finite double is a dyadic rational).
Rat rat_from_double(double x);

double rat_to_double(const Rat& x);

// Parses "p/q", "p", or a decimal literal like "-0.25" (exact).
Rat rat_parse(const std::string& s);

std::string rat_str(const Rat& x);

Rat rat_pow(const Rat& base, unsigned long e);

// 2^-j as an exact rational.
Rat dyadic_measure(uint32_t j);

// x^(1/k) in double precision, x >= 0.
double rat_root(const Rat& x, unsigned long k);

}  // namespace haardy

#endif
