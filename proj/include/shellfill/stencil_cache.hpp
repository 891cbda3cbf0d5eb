#pragma once

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "shellfill/stencil.hpp"

namespace shellfill {

inline NeighborhoodKind neighborhood_for(Method m) {
  switch (m) {
    case Method::coherence_transport:
      return NeighborhoodKind::ball;
    case Method::guidefill:
    case Method::guidefill_semi_implicit:
      return NeighborhoodKind::rotated_ball;
    case Method::box_gaussian:
      return NeighborhoodKind::box;
    case Method::telea:
      break;
  }
  throw std::invalid_argument("telea is handled by fill_telea");
}

/// Full (unrestricted) neighborhood stencils, memoized on the quantized guide
/// direction (1e-6 rad buckets) so spatially varying fields do not rebuild
/// per pixel. References stay valid across inserts.
class StencilCache {
 public:
  StencilCache(Method method, int r, double mu)
      : method_(method), r_(r), mu_(mu) {}

  const Stencil& get(Vec2 g) {
    long long key = llround(theta_mod_pi(g) / 1e-6);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = table_.find(key);
      if (it != table_.end()) return it->second;
    }
    Stencil s = eval_weights(
        method_, make_neighborhood(neighborhood_for(method_), r_, g), g, mu_,
        r_);
    std::lock_guard<std::mutex> lock(mutex_);
    return table_.emplace(key, std::move(s)).first->second;
  }

 private:
  Method method_;
  int r_;
  double mu_;
  std::unordered_map<long long, Stencil> table_;
  std::mutex mutex_;
};

}  // namespace shellfill
