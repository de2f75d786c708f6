#pragma once

#include <stdexcept>
#include <string>

namespace framelab {

/// Bad argument values or violated preconditions.
struct invalid_input : std::invalid_argument {
    explicit invalid_input(const std::string& msg) : std::invalid_argument(msg) {}
};

/// A requested computation exceeds a hard size bound (dense storage, point count).
struct resource_limit : std::runtime_error {
    resource_limit(const std::string& msg, std::size_t requested, std::size_t limit)
        : std::runtime_error(msg + " (requested " + std::to_string(requested) +
                             ", limit " + std::to_string(limit) + ")"),
          requested(requested),
          limit(limit) {}
    std::size_t requested;
    std::size_t limit;
};

/// A numerical invariant that should hold by construction failed
/// (non-PSD Gram, eigendecomposition residual, ...).
struct invariant_violation : std::runtime_error {
    explicit invariant_violation(const std::string& msg) : std::runtime_error(msg) {}
};

/// Probe family collapsed under regularization; no directions left.
struct degenerate_probe : std::runtime_error {
    explicit degenerate_probe(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace framelab
