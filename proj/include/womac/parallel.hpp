#pragma once

#include <exception>
#include <mutex>

namespace womac {

/// Caps the worker count of every parallel kernel. 0 keeps the runtime default.
void set_threads(int threads);
int max_threads();

/// Carries the first exception out of an OpenMP region.
class ExceptionSlot {
 public:
  template <class F>
  void run(F&& body) noexcept {
    try {
      body();
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }

  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

}  // namespace womac
