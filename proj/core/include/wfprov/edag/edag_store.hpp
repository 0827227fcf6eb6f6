#pragma once

#include <mutex>
#include <shared_mutex>
#include <utility>

#include "wfprov/edag/edag.hpp"

namespace wfprov {

/// Single-writer / multi-reader holder of the eDAG. Readers see a consistent
/// snapshot identified by EDag::version() for the duration of `read`.
class EDagStore {
 public:
  EDagStore() = default;
  explicit EDagStore(EDag dag) : dag_(std::move(dag)) {}

  template <typename F>
  decltype(auto) read(F&& f) const {
    std::shared_lock lock(mu_);
    return std::forward<F>(f)(static_cast<const EDag&>(dag_));
  }

  template <typename F>
  decltype(auto) write(F&& f) {
    std::unique_lock lock(mu_);
    return std::forward<F>(f)(dag_);
  }

  std::uint64_t version() const {
    std::shared_lock lock(mu_);
    return dag_.version();
  }

  void reset(EDag dag) {
    std::unique_lock lock(mu_);
    dag_ = std::move(dag);
  }

 private:
  mutable std::shared_mutex mu_;
  EDag dag_;
};

}  // namespace wfprov
