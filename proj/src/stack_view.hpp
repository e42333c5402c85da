#pragma once

#include "fbd/liegroup.hpp"

#include <span>

namespace fbd {

// Columns of a 6 × L matrix as a span of 6-vectors (column-major, contiguous).
inline std::span<const Vec6> columns(const Mat6X& m) {
  return {reinterpret_cast<const Vec6*>(m.data()), static_cast<std::size_t>(m.cols())};
}

}  // namespace fbd
