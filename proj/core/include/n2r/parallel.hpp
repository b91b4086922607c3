// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace n2r {

// Runs fn(i) for i in [begin, end) on up to hardware_concurrency threads,
// each thread owning one contiguous slice. Work must not depend on which
// thread executes it; outputs indexed by i stay deterministic.
template <typename Fn>
void parallel_for(std::int64_t begin, std::int64_t end, const Fn& fn) {
  const std::int64_t n = end - begin;
  if (n <= 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const std::int64_t workers = std::min<std::int64_t>(hw, n);
  if (workers <= 1) {
    for (std::int64_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (std::int64_t w = 0; w < workers; ++w) {
    const std::int64_t lo = begin + n * w / workers;
    const std::int64_t hi = begin + n * (w + 1) / workers;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::int64_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Partitions [0, n) into a fixed number of contiguous chunks and runs
// fn(chunk_index, lo, hi) for each, in parallel. The chunk count is
// independent of the machine, so per-chunk accumulators reduced in chunk
// order give bit-identical results everywhere.
template <typename Fn>
void parallel_chunks(std::int64_t n, int chunks, const Fn& fn) {
  if (n <= 0 || chunks <= 0) return;
  parallel_for(0, chunks, [&](std::int64_t c) {
    const std::int64_t lo = n * c / chunks;
    const std::int64_t hi = n * (c + 1) / chunks;
    if (lo < hi) fn(static_cast<int>(c), lo, hi);
  });
}

}  // namespace n2r
