#pragma once

#include <cstddef>
#include <functional>

namespace hmc {

// Runs fn(shard_index) for every shard on up to max_workers threads
// (hardware concurrency when 0).  The shard partition is fixed by the caller,
// so results never depend on how many workers actually ran.
void parallel_shards(std::size_t n_shards, const std::function<void(std::size_t)>& fn,
                     unsigned max_workers = 0);

}  // namespace hmc
