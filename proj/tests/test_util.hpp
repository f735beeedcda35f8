#pragma once

#include <optional>
#include <utility>

#include "prs/error.hpp"

namespace prs::test {

// Runs f and reports which Error code it raised, if any.
template <typename F>
std::optional<ErrorCode> caught(F&& f) {
  try {
    std::forward<F>(f)();
    return std::nullopt;
  } catch (const Error& e) {
    return e.code();
  }
}

}  // namespace prs::test
