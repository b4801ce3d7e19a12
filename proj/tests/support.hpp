#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <doctest.h>

#include "tlf/diagnostics.hpp"

namespace tlf::test {

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

#define CHECK_REL(actual, expected, tol)                                                  \
    do {                                                                                  \
        const double tlf_a_ = (actual);                                                   \
        const double tlf_e_ = (expected);                                                 \
        INFO("actual = " << tlf_a_ << ", expected = " << tlf_e_);                         \
        CHECK(::tlf::test::rel_diff(tlf_a_, tlf_e_) <= (tol));                             \
    } while (0)

/// Collects warnings emitted while in scope.
class WarningCapture {
public:
    WarningCapture()
        : guard_([this](std::string_view m) { messages.emplace_back(m); }) {}

    std::vector<std::string> messages;

private:
    ScopedWarningHandler guard_;
};

}  // namespace tlf::test
