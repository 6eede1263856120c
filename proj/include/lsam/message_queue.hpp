#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <mutex>

namespace lsam {

// Ordered blocking queue; the only shared state between execution units in
// the real-concurrent scheduler.
template <typename T>
class MessageQueue {
 public:
  void push(T value) {
    {
      std::lock_guard lock(mutex_);
      items_.push_back(std::move(value));
      ++pushed_;
    }
    cv_.notify_one();
  }

  T pop() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return !items_.empty(); });
    T value = std::move(items_.front());
    items_.pop_front();
    ++popped_;
    return value;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return items_.size();
  }

  // Lifetime counters, used to check message conservation at quiescence.
  std::size_t total_pushed() const {
    std::lock_guard lock(mutex_);
    return pushed_;
  }
  std::size_t total_popped() const {
    std::lock_guard lock(mutex_);
    return popped_;
  }

 private:
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<T> items_;
  std::size_t pushed_ = 0;
  std::size_t popped_ = 0;
};

}  // namespace lsam
