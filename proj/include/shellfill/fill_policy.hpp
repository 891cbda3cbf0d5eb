#pragma once

#include <functional>
#include <vector>

#include "shellfill/lattice.hpp"
#include "shellfill/stencil.hpp"

namespace shellfill {

enum class ReadyPolicy { onion, confidence, coupled };

struct ReadyConfig {
  ReadyPolicy policy = ReadyPolicy::onion;
  double threshold_c = 0.05;  // a small constant; anything well under 1 works
  int max_iterations = 100;   // coupled fixed-point cap
};

/// Guidefill confidence: usable weight over total weight of the full
/// (unrestricted) neighborhood stencil at x.
double confidence(IVec2 x, const FillState& state, const Stencil& full_stencil);

/// Algorithm-2 coupled readiness: the monotone fixed point of
/// ready(x) = 1(C(x) + dC(x, r) > c), where dC counts weight landing on
/// same-shell pixels that are themselves ready. Returns a superset of the
/// plain-confidence ready set.
std::vector<IVec2> coupled_ready(const std::vector<IVec2>& shell,
                                 const FillState& state,
                                 const Stencil& full_stencil,
                                 const ReadyConfig& cfg);

/// Overload for spatially varying guides: `stencil_at` yields each pixel's
/// own full neighborhood stencil.
std::vector<IVec2> coupled_ready(
    const std::vector<IVec2>& shell, const FillState& state,
    const std::function<const Stencil&(IVec2)>& stencil_at,
    const ReadyConfig& cfg);

/// Exact Euclidean distance (in units of spacing_h) from every pixel to the
/// nearest known pixel of the original mask; 0 on known pixels.
std::vector<double> distance_transform(const FillState& state,
                                       double spacing_h = 1.0);

}  // namespace shellfill
