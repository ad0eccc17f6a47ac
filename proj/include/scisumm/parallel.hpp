#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace scisumm {

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Applies `fn` to every input on up to `workers` threads. Output order
/// matches input order; the first exception is rethrown on the caller.
template <typename In, typename Fn>
auto ordered_map(const std::vector<In>& inputs, unsigned workers, Fn&& fn) {
  using Out = decltype(fn(inputs.front()));
  std::vector<Out> out(inputs.size());
  const unsigned threads =
      std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(inputs.size())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < inputs.size(); ++i) out[i] = fn(inputs[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i; (i = next.fetch_add(1)) < inputs.size();) out[i] = fn(inputs[i]);
      } catch (...) {
        errors[t] = std::current_exception();
        next = inputs.size();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace scisumm
