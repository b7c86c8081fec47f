#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace sg {

// Static slice parallelism with per-index independent work; output written
// into caller-owned slots, so results do not depend on the worker count.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

// FNV-1a over a byte string; used as a config fingerprint in output files.
std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

// Write to "<path>.tmp" then rename, so partial outputs never land under
// the final name.
void atomic_write_file(const std::string& path, const std::string& contents);

}  // namespace sg
