#pragma once

#include <stdexcept>
#include <string>

namespace dimerloops {

// Thrown when an exact computation would exceed its resource guard.
// Callers (CLI, suite runner) report these as SKIPPED rather than failed.
struct budget_exceeded : std::runtime_error {
    explicit budget_exceeded(const std::string& what) : std::runtime_error(what) {}
};

} // namespace dimerloops
