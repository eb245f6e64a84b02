// Copyright 2026 The slideseg Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string_view>
#include <thread>
#include <vector>

namespace slideseg {

enum class BackendKind { kSerial, kParallel };

std::string_view backend_name(BackendKind kind) noexcept;
BackendKind parse_backend(std::string_view name);

/// Fixed-size worker pool. Jobs are plain closures; run_batch blocks until
/// every job of the batch has finished and rethrows the first exception.
class ThreadPool {
 public:
  explicit ThreadPool(int threads);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int size() const noexcept { return static_cast<int>(workers_.size()); }
  void run_batch(std::vector<std::function<void()>> jobs);

 private:
  void worker_loop();

  std::vector<std::thread> workers_;
  std::deque<std::function<void()>> queue_;
  std::mutex mutex_;
  std::condition_variable cv_;
  bool stopping_ = false;
};

/// Compute backend. The parallel backend splits work into contiguous chunks
/// executed on a pool; every kernel is integer-only, so results are bitwise
/// identical to the serial backend for any width.
class Backend {
 public:
  static Backend serial();
  static Backend parallel(int jobs);

  BackendKind kind() const noexcept { return kind_; }
  int width() const noexcept { return width_; }

  /// Calls fn(begin, end, chunk) over [0, count) split into at most width()
  /// contiguous chunks. chunk is in [0, chunks_for(count)).
  void for_chunks(std::size_t count,
                  const std::function<void(std::size_t, std::size_t, int)>& fn) const;

  int chunks_for(std::size_t count) const noexcept;

 private:
  Backend(BackendKind kind, int width);

  BackendKind kind_ = BackendKind::kSerial;
  int width_ = 1;
  std::shared_ptr<ThreadPool> pool_;
};

}  // namespace slideseg
