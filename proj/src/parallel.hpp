#pragma once

#include "magprop/core.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace magprop::detail {

// Splits [0, n) into contiguous chunks, one per worker. `body(begin, end)`
// must only write to indices it owns.
template <typename Body>
void parallel_for(Index n, Body&& body) {
  const Index workers = std::min<Index>(static_cast<Index>(thread_limit()), std::max<Index>(n / 64, 1));
  if (workers <= 1) {
    body(Index{0}, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const Index chunk = (n + workers - 1) / workers;
  for (Index w = 0; w < workers; ++w) {
    const Index begin = w * chunk;
    const Index end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
}

}  // namespace magprop::detail
