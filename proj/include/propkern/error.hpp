#pragma once

#include <stdexcept>
#include <string>

namespace propkern {

// Invalid input or broken contract detected by the library.
// The CLI maps this to exit code 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& what) {
    if (!condition) throw Error(what);
}

}  // namespace propkern
