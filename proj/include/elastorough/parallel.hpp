#ifndef ELASTOROUGH_PARALLEL_HPP
#define ELASTOROUGH_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace elastorough
{

// Process-wide worker cap; 0 or 1 means serial.
inline std::atomic<int> &thread_limit()
{
  static std::atomic<int> n{1};
  return n;
}

inline void set_thread_limit(int n)
{
  thread_limit() = std::max(1, n);
}

// Set inside workers so nested parallel_for calls run serially.
inline bool &in_parallel_worker()
{
  thread_local bool flag = false;
  return flag;
}

//
// Runs body(i) for i in [0, n) on up to thread_limit() workers with static chunking.
// Callers keep results deterministic by writing into per-index slots.
//
template <typename F>
void parallel_for(int n, F &&body)
{
  const int workers = in_parallel_worker() ? 1 : std::min(thread_limit().load(), n);
  if (workers <= 1)
  {
    for (int i = 0; i < n; ++i)
    {
      body(i);
    }
    return;
  }
  std::exception_ptr err;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t)
  {
    pool.emplace_back([&, t] {
      in_parallel_worker() = true;
      try
      {
        for (int i = t; i < n; i += workers)
        {
          body(i);
        }
      }
      catch (...)
      {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!err)
        {
          err = std::current_exception();
        }
      }
    });
  }
  for (auto &th : pool)
  {
    th.join();
  }
  if (err)
  {
    std::rethrow_exception(err);
  }
}

}  // namespace elastorough

#endif  // ELASTOROUGH_PARALLEL_HPP
