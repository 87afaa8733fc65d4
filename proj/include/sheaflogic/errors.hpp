#pragma once

#include <stdexcept>
#include <string>

namespace sheaflogic {

// Bad user input (malformed maps, sort mismatches, parse errors, ...).
// The CLI maps this to exit code 2.
struct invalid_input : std::runtime_error {
    explicit invalid_input(const std::string& what) : std::runtime_error(what) {}
};

// Raised by descend() when the element is not invariant along the map,
// i.e. no descendent exists.
struct not_invariant : std::runtime_error {
    explicit not_invariant(const std::string& what) : std::runtime_error(what) {}
};

// A configured budget (team count, witness world size, extension count)
// would be exceeded. The CLI maps this to exit code 3.
struct resource_exceeded : std::runtime_error {
    explicit resource_exceeded(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sheaflogic
