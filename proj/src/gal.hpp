// SPDX-License-Identifier: Apache-2.0
//
// Generalized acceleration lemmas: the (base, stay, step, conc) quadruple,
// inequality base lemmas and the four composition operators. Every Gal built
// through this interface is valid by construction (base lemmas are instances
// of the inequality schema; compositions preserve validity).

#ifndef GALATT_GAL_HPP
#define GALATT_GAL_HPP

#include <optional>
#include <vector>

#include "formula.hpp"

namespace galatt {

struct Gal {
  Formula base;  // over V
  Formula stay;  // over V + V'
  Formula step;  // over V + V'
  Formula conc;  // over V
  std::vector<Variable> vars;  // V, sorted

  // Extends the ambient variable set (formulas unchanged).
  Gal with_vars(std::vector<Variable> v) const;
  std::string display() const;
};

// Inequality base lemma for an affine term t and bounds a <= t <= b
// (either side may be absent). Progress is by a fixed eps > 0; the strict
// flag switches to the strict-inequality variant of the base.
Gal base_gal(const LinearTerm& t, const std::optional<Rational>& lower,
             const std::optional<Rational>& upper, const Rational& eps, bool strict = false);

Gal intersect(const Gal& g0, const Gal& g1);
Gal lex_union(const Gal& g0, const Gal& g1);
Gal chain(const Gal& g0, const Gal& g1);
Gal strengthen(const Gal& g, const Formula& inv);

// (true, true, true, true): every sequence starts in base.
Gal trivial_gal(std::vector<Variable> vars);

}  // namespace galatt

#endif
