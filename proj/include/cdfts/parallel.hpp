#pragma once

#include <cstddef>
#include <functional>

namespace cdfts {

/// Worker count used by row-parallel kernels. Defaults to the CDFTS_THREADS
/// environment variable, or 1 when unset or unparsable.
std::size_t thread_count();

/// Overrides the worker count for the rest of the process (0 restores the
/// environment default).
void set_thread_count(std::size_t threads);

/// Calls body(i) for every i in [begin, end), splitting the range into
/// contiguous chunks across thread_count() workers. Bodies must only write
/// state owned by index i, so results do not depend on the worker count.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body);

} // namespace cdfts
