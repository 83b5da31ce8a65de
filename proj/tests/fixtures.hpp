#pragma once

#include <numbers>

#include "refugia/geometry.hpp"

namespace refugia::fixtures {

inline constexpr double kPi = std::numbers::pi;

inline RingSpec ring(int n = 256) {
  RingSpec r;
  r.circumference = 2.0 * kPi;
  r.refuge_start = 0.0;
  r.refuge_length = kPi;
  r.resolution = n;
  return r;
}

inline RectSpec rect(int nx = 128, int ny = 64) {
  RectSpec r;
  r.outer_min = {0.0, 0.0};
  r.outer_max = {2.0, 1.0};
  r.hole_min = {0.8, 0.4};
  r.hole_max = {1.2, 0.6};
  r.resolution = {nx, ny};
  return r;
}

}  // namespace refugia::fixtures
