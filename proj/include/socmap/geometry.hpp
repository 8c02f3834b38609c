#pragma once

#include <cmath>

namespace socmap {

// Planar projected position in km.
struct location {
  double x_km = 0.0;
  double y_km = 0.0;

  friend bool operator==(const location&, const location&) = default;
};

inline double distance(const location& a, const location& b) {
  return std::hypot(a.x_km - b.x_km, a.y_km - b.y_km);
}

}  // namespace socmap
