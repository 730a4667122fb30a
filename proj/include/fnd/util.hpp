#pragma once

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

namespace fnd {

// Sink for non-fatal diagnostics. Callers that want to inspect warnings pass
// a vector; otherwise messages go to stderr.
inline void warn_into(std::vector<std::string>* sink, std::string msg) {
    if (sink)
        sink->push_back(std::move(msg));
    else
        std::cerr << "warning: " << msg << '\n';
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based seed derivation: independent streams from one master seed,
// stable no matter in which order the consumers run.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
    return splitmix64(master ^ splitmix64(counter + 1));
}

} // namespace fnd
