#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace mdev {

// Deterministic block-parallel reduction: items are partitioned into fixed
// blocks, workers claim blocks dynamically, each block runs its items in
// order, and block partials merge in a fixed pairwise tree. The result is
// bit-identical for every worker count.
//
// Acc needs a default constructor and void merge(const Acc&).
// Fn is called as fn(acc, item_index).
template <typename Acc, typename Fn>
Acc parallel_block_reduce(std::uint64_t n_items, int workers, Fn&& fn,
                          std::uint64_t block_size = 4096) {
  if (n_items == 0) return Acc{};
  if (workers < 1) workers = 1;
  const std::uint64_t n_blocks = (n_items + block_size - 1) / block_size;
  std::vector<Acc> partials(n_blocks);
  std::atomic<std::uint64_t> next{0};

  auto work = [&]() {
    for (;;) {
      const std::uint64_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      Acc acc{};
      const std::uint64_t lo = b * block_size;
      const std::uint64_t hi = std::min(n_items, lo + block_size);
      for (std::uint64_t i = lo; i < hi; ++i) fn(acc, i);
      partials[b] = acc;
    }
  };

  if (workers == 1 || n_blocks == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    const int extra = std::min<std::uint64_t>(workers - 1, n_blocks) ;
    pool.reserve(extra);
    for (int t = 0; t < extra; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
  }

  // pairwise tree merge in block order
  std::uint64_t count = n_blocks;
  while (count > 1) {
    std::uint64_t out = 0;
    for (std::uint64_t i = 0; i + 1 < count; i += 2) {
      partials[i].merge(partials[i + 1]);
      partials[out++] = partials[i];
    }
    if (count % 2 == 1) partials[out++] = partials[count - 1];
    count = out;
  }
  return partials[0];
}

}  // namespace mdev
