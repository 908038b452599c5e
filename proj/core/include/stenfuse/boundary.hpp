#pragma once

#include <string>

namespace stenfuse {

// Boundary value policy that defines the halo contents for indices
// outside the interior. Zero and Constant fill a fixed value; Periodic
// wraps around the interior.
struct BoundaryPolicy {
  enum class Kind { Zero, Constant, Periodic };

  Kind kind = Kind::Zero;
  double value = 0.0;  // only meaningful for Constant

  static BoundaryPolicy zero() { return {Kind::Zero, 0.0}; }
  static BoundaryPolicy constant(double v) { return {Kind::Constant, v}; }
  static BoundaryPolicy periodic() { return {Kind::Periodic, 0.0}; }

  friend bool operator==(const BoundaryPolicy&, const BoundaryPolicy&) = default;

  std::string name() const {
    switch (kind) {
      case Kind::Zero: return "zero";
      case Kind::Constant: return "constant";
      case Kind::Periodic: return "periodic";
    }
    return "?";
  }
};

}  // namespace stenfuse
