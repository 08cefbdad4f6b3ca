#pragma once

#include "ppens/mms.hpp"

#include <memory>

namespace ppens::test {

inline std::shared_ptr<const DomainShape> unit_square() {
  return std::make_shared<Rectangle>(Vec2(0, 0), Vec2(1, 1));
}

inline std::shared_ptr<const DomainShape> hole_domain() {
  return std::make_shared<RectangleMinusDisk>(Vec2(0, 0), Vec2(2, 2), Vec2(0.75, 1.0), 0.25, true);
}

inline double max_abs(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace ppens::test
