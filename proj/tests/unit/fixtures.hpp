#pragma once

#include "mbpi/laws.hpp"

namespace fixtures {

// gamma = 0.25
inline mbpi::ModelSpec recurrent() {
  return mbpi::ModelSpec(mbpi::make_stable_offspring(0.5, 1.0), mbpi::make_stable_immigration(0.75, 0.25));
}

// gamma = -0.25, d/c = |gamma|
inline mbpi::ModelSpec transient() {
  return mbpi::ModelSpec(mbpi::make_stable_offspring(0.75, 1.0), mbpi::make_stable_immigration(0.5, 0.25));
}

// L(x) = 1 + x^{-1/2}
inline mbpi::ModelSpec perturbed() {
  return mbpi::ModelSpec(mbpi::make_stable_offspring(0.5, 1.0, 1.0), mbpi::make_stable_immigration(0.75, 0.25));
}

}  // namespace fixtures
