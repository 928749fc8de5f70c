#pragma once

// GMP interop for code that needs big-integer work beyond Rational's
// arithmetic (product trees, exact harmonic sums). Not part of the stable API.

#include <gmpxx.h>

#include "cupgame/rational.hpp"

namespace cupgame {

struct Rational::Big {
  mpq_class q;
};

mpq_class to_mpq(const Rational& r);
// `q` must be canonical.
Rational from_mpq(mpq_class q);

}  // namespace cupgame
