#include "wavetraj/ray_pool.hpp"

#include <algorithm>

namespace wavetraj {

namespace {

std::pair<int, int> chunk(int count, int slot, int parts) {
  const long begin = static_cast<long>(count) * slot / parts;
  const long end = static_cast<long>(count) * (slot + 1) / parts;
  return {static_cast<int>(begin), static_cast<int>(end)};
}

}  // namespace

RayPool::RayPool(int workers) : workers_(std::max(1, workers)) {
  for (int slot = 1; slot < workers_; ++slot) {
    threads_.emplace_back([this, slot] { worker_loop(slot); });
  }
}

RayPool::~RayPool() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& t : threads_) t.join();
}

void RayPool::run(int count, const std::function<void(int, int)>& body) {
  if (workers_ == 1 || count < 2 * workers_) {
    body(0, count);
    return;
  }
  {
    std::lock_guard lock(mutex_);
    body_ = &body;
    count_ = count;
    pending_ = workers_ - 1;
    failure_ = nullptr;
    ++generation_;
  }
  wake_.notify_all();

  std::exception_ptr mine;
  try {
    const auto [b, e] = chunk(count, 0, workers_);
    body(b, e);
  } catch (...) {
    mine = std::current_exception();
  }

  std::unique_lock lock(mutex_);
  done_.wait(lock, [this] { return pending_ == 0; });
  body_ = nullptr;
  if (mine) std::rethrow_exception(mine);
  if (failure_) std::rethrow_exception(failure_);
}

void RayPool::worker_loop(int slot) {
  long seen = 0;
  for (;;) {
    const std::function<void(int, int)>* body = nullptr;
    int count = 0;
    {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      body = body_;
      count = count_;
    }
    std::exception_ptr err;
    try {
      const auto [b, e] = chunk(count, slot, workers_);
      (*body)(b, e);
    } catch (...) {
      err = std::current_exception();
    }
    {
      std::lock_guard lock(mutex_);
      if (err && !failure_) failure_ = err;
      --pending_;
    }
    done_.notify_one();
  }
}

}  // namespace wavetraj
