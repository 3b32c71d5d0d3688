#pragma once

#include <condition_variable>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "wavetraj/types.hpp"

namespace wavetraj {

/// Fixed set of worker threads that split a ray range into contiguous chunks.
/// Chunk boundaries depend only on the range size and worker count, and every
/// per-ray result is written by exactly one worker, so the output does not
/// depend on scheduling.
class RayPool {
 public:
  explicit RayPool(int workers);
  ~RayPool();

  RayPool(const RayPool&) = delete;
  RayPool& operator=(const RayPool&) = delete;

  int workers() const { return workers_; }

  void run(int count, const std::function<void(int, int)>& body);

  RangeRunner runner() {
    return [this](int count, const std::function<void(int, int)>& body) { run(count, body); };
  }

 private:
  void worker_loop(int slot);

  int workers_;
  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(int, int)>* body_ = nullptr;
  int count_ = 0;
  long generation_ = 0;
  int pending_ = 0;
  bool stop_ = false;
  std::exception_ptr failure_;
};

}  // namespace wavetraj
