#pragma once

#include <stdexcept>
#include <string>

namespace pvuptake {

/// Classification of user-correctable input problems. Carried by input_error
/// so callers (and tests) can react to the failure class, not the message text.
enum class input_errc {
    parse,              // malformed token, bad month, bad number
    gap,                // missing month in a series that must be contiguous
    duplicate_month,    // same month appears twice
    empty_input,        // file or sequence has no usable rows
    unit_mismatch,      // series tagged with the wrong unit for an operation
    misaligned,         // series ranges differ where they must coincide
    empty_intersection, // aligned range would be empty
    coverage,           // requested month/range not covered by a series
    bad_argument,       // parameter outside its documented domain
    zero_variance,      // statistic undefined on a constant series
    io,                 // file missing or unreadable
};

/// Any problem the user can fix by changing inputs or flags. The CLI maps
/// these to exit code 1 with a one-line diagnostic.
class input_error : public std::runtime_error {
public:
    input_error(input_errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    input_errc code() const noexcept { return code_; }

private:
    input_errc code_;
};

/// A model invariant failed to hold. Not user-correctable; the CLI maps
/// these to exit code 2.
class internal_error : public std::logic_error {
public:
    explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

} // namespace pvuptake
