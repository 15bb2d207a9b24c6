#pragma once

#include <cstdlib>
#include <string>

namespace fixtures {

// Repository data directory, injected by CTest; falls back to a relative
// path for manual runs from the build tree.
inline std::string data_path(const std::string& name) {
    const char* dir = std::getenv("FA_DATA_DIR");
    return (dir ? std::string(dir) : std::string("../data")) + "/" + name;
}

}  // namespace fixtures
