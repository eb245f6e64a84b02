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
#include "slideseg/backend.hpp"

#include <algorithm>
#include <exception>

#include "slideseg/error.hpp"

namespace slideseg {

std::string_view backend_name(BackendKind kind) noexcept {
  return kind == BackendKind::kSerial ? "serial" : "parallel";
}

BackendKind parse_backend(std::string_view name) {
  if (name == "serial") return BackendKind::kSerial;
  if (name == "parallel") return BackendKind::kParallel;
  throw ParameterError("unknown backend '" + std::string(name) + "'");
}

ThreadPool::ThreadPool(int threads) {
  for (int i = 0; i < threads; ++i) {
    workers_.emplace_back([this] { worker_loop(); });
  }
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  cv_.notify_all();
  for (auto& t : workers_) t.join();
}

void ThreadPool::worker_loop() {
  for (;;) {
    std::function<void()> job;
    {
      std::unique_lock lock(mutex_);
      cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;
      job = std::move(queue_.front());
      queue_.pop_front();
    }
    job();
  }
}

void ThreadPool::run_batch(std::vector<std::function<void()>> jobs) {
  if (jobs.empty()) return;
  std::mutex done_mutex;
  std::condition_variable done_cv;
  std::size_t remaining = jobs.size();
  std::exception_ptr first_error;

  {
    std::lock_guard lock(mutex_);
    for (auto& job : jobs) {
      queue_.emplace_back([&, job = std::move(job)] {
        std::exception_ptr err;
        try {
          job();
        } catch (...) {
          err = std::current_exception();
        }
        std::lock_guard done_lock(done_mutex);
        if (err && !first_error) first_error = err;
        if (--remaining == 0) done_cv.notify_one();
      });
    }
  }
  cv_.notify_all();

  std::unique_lock lock(done_mutex);
  done_cv.wait(lock, [&] { return remaining == 0; });
  if (first_error) std::rethrow_exception(first_error);
}

Backend::Backend(BackendKind kind, int width) : kind_(kind), width_(width) {
  if (kind_ == BackendKind::kParallel && width_ > 1) {
    pool_ = std::make_shared<ThreadPool>(width_);
  }
}

Backend Backend::serial() { return Backend(BackendKind::kSerial, 1); }

Backend Backend::parallel(int jobs) {
  if (jobs < 1) throw ParameterError("jobs must be >= 1");
  return Backend(BackendKind::kParallel, jobs);
}

int Backend::chunks_for(std::size_t count) const noexcept {
  if (count == 0) return 0;
  return static_cast<int>(std::min<std::size_t>(count, static_cast<std::size_t>(width_)));
}

void Backend::for_chunks(
    std::size_t count,
    const std::function<void(std::size_t, std::size_t, int)>& fn) const {
  const int chunks = chunks_for(count);
  if (chunks == 0) return;
  if (chunks == 1 || !pool_) {
    // Same chunk boundaries as the pooled path, run inline.
    for (int c = 0; c < chunks; ++c) {
      fn(count * c / chunks, count * (c + 1) / chunks, c);
    }
    return;
  }
  std::vector<std::function<void()>> jobs;
  jobs.reserve(chunks);
  for (int c = 0; c < chunks; ++c) {
    const std::size_t begin = count * c / chunks;
    const std::size_t end = count * (c + 1) / chunks;
    jobs.emplace_back([&fn, begin, end, c] { fn(begin, end, c); });
  }
  pool_->run_batch(std::move(jobs));
}

}  // namespace slideseg
