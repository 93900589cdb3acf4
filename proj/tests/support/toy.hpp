#pragma once

#include "focus/corpus.hpp"
#include "focus/similarity.hpp"

namespace focus::testing {

// Three-project toy: background p1, p2 and a transient active project pa
// whose last declaration {i3, i4} is the active one.
Corpus toy_background();
ActiveProject toy_active(const Corpus& background);

// Exact predictions from tests/oracles/toy_oracle.py (k = 2, M = 25).
inline constexpr double kToyPredictionI1 = 11.0 / 68.0;
inline constexpr double kToyPredictionI2 = 27.0 / 68.0;
inline constexpr double kToySimilarityP1 = 0.24253562503633297;
inline constexpr double kToySimilarityP2 = 0.9701425001453319;

}  // namespace focus::testing
