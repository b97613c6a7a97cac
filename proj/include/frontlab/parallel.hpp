#pragma once

#include <barrier>
#include <functional>
#include <thread>
#include <vector>

namespace frontlab {

/// Persistent workers that split a row range [0, n) into contiguous blocks.
/// Each call to for_blocks() is a full barrier: it returns once every block
/// is done. The calling thread runs block 0.
class RowWorkers {
 public:
  explicit RowWorkers(int count) : count_(count < 1 ? 1 : count), sync_(count_) {
    for (int k = 1; k < count_; ++k) threads_.emplace_back([this, k] { loop(k); });
  }
  ~RowWorkers() {
    if (count_ > 1) {
      stop_ = true;
      sync_.arrive_and_wait();
    }
    for (auto& t : threads_) t.join();
  }
  RowWorkers(const RowWorkers&) = delete;
  RowWorkers& operator=(const RowWorkers&) = delete;

  int count() const { return count_; }

  void for_blocks(long n, const std::function<void(long, long)>& fn) {
    if (count_ == 1) {
      fn(0, n);
      return;
    }
    task_ = &fn;
    n_ = n;
    sync_.arrive_and_wait();
    run_block(0);
    sync_.arrive_and_wait();
  }

 private:
  void run_block(int k) {
    const long begin = n_ * k / count_, end = n_ * (k + 1) / count_;
    if (begin < end) (*task_)(begin, end);
  }
  void loop(int k) {
    for (;;) {
      sync_.arrive_and_wait();
      if (stop_) return;
      run_block(k);
      sync_.arrive_and_wait();
    }
  }

  int count_;
  std::barrier<> sync_;
  std::vector<std::thread> threads_;
  const std::function<void(long, long)>* task_ = nullptr;
  long n_ = 0;
  bool stop_ = false;
};

}  // namespace frontlab
