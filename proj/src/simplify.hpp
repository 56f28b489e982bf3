// SPDX-License-Identifier: Apache-2.0

#ifndef GALATT_SIMPLIFY_HPP
#define GALATT_SIMPLIFY_HPP

#include "formula.hpp"

namespace galatt {

// Equivalence-preserving structural simplification: constant folding, literal
// normalization, bound merging per slope, quantifier scope reduction and
// one-point elimination. Pure, no solver involved.
Formula simplify_syntactic(const Formula& f);

}  // namespace galatt

#endif
