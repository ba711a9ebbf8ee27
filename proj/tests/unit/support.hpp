#pragma once

#include <cmath>
#include <optional>

#include "smld/error.hpp"

namespace support {

// Code of the Error thrown by f, or empty when f returns normally.
template <class F>
std::optional<smld::Errc> error_code(F&& f) {
  try {
    f();
  } catch (const smld::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline double rel_err(double value, double reference) {
  return std::fabs(value - reference) / std::max(std::fabs(reference), 1e-300);
}

}  // namespace support
