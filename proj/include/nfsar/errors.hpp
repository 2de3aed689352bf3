#pragma once

#include <stdexcept>
#include <string>

namespace nfsar {

// Problems with file or stream content: bad magic, truncation, unparsable text.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Violated numeric or shape contracts: non-positive spacings, empty grids,
// non-finite parameters, mismatched buffer sizes.
class InvariantError : public std::runtime_error {
public:
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvariantError(message);
}

}  // namespace detail

}  // namespace nfsar
