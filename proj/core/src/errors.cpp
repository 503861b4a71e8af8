#include "erspec/errors.hpp"

namespace erspec {

DegenerateSupport::DegenerateSupport(int v, int r)
    : std::runtime_error("empty sphere S_" + std::to_string(r) + " around vertex " + std::to_string(v)),
      vertex(v),
      radius(r) {}

}  // namespace erspec
