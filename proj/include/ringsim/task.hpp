#pragma once

#include <coroutine>
#include <exception>
#include <optional>
#include <utility>

namespace ringsim::rt {

// Minimal coroutine task for party processes. Tasks start suspended; awaiting
// a child task transfers control into it and resumes the parent when the
// child completes. Exceptions propagate to the awaiting frame.
template <typename T>
class [[nodiscard]] Task {
 public:
  struct promise_type;
  using handle_t = std::coroutine_handle<promise_type>;

  struct FinalAwaiter {
    bool await_ready() noexcept { return false; }
    std::coroutine_handle<> await_suspend(handle_t h) noexcept {
      auto cont = h.promise().continuation;
      return cont ? cont : std::noop_coroutine();
    }
    void await_resume() noexcept {}
  };

  struct promise_type {
    std::optional<T> value;
    std::exception_ptr exc;
    std::coroutine_handle<> continuation;

    Task get_return_object() { return Task(handle_t::from_promise(*this)); }
    std::suspend_always initial_suspend() noexcept { return {}; }
    FinalAwaiter final_suspend() noexcept { return {}; }
    void return_value(T v) { value = std::move(v); }
    void unhandled_exception() { exc = std::current_exception(); }
  };

  Task() = default;
  explicit Task(handle_t h) : h_(h) {}
  Task(Task&& o) noexcept : h_(std::exchange(o.h_, {})) {}
  Task& operator=(Task&& o) noexcept {
    if (this != &o) {
      destroy();
      h_ = std::exchange(o.h_, {});
    }
    return *this;
  }
  Task(const Task&) = delete;
  Task& operator=(const Task&) = delete;
  ~Task() { destroy(); }

  bool done() const { return !h_ || h_.done(); }
  handle_t handle() const { return h_; }

  // Awaiting a child task from a parent coroutine.
  bool await_ready() { return false; }
  std::coroutine_handle<> await_suspend(std::coroutine_handle<> parent) {
    h_.promise().continuation = parent;
    return h_;
  }
  T await_resume() {
    if (h_.promise().exc) std::rethrow_exception(h_.promise().exc);
    return std::move(*h_.promise().value);
  }

  void rethrow_if_failed() const {
    if (h_ && h_.done() && h_.promise().exc) std::rethrow_exception(h_.promise().exc);
  }

 private:
  void destroy() {
    if (h_) h_.destroy();
  }
  handle_t h_;
};

template <>
class [[nodiscard]] Task<void> {
 public:
  struct promise_type;
  using handle_t = std::coroutine_handle<promise_type>;

  struct FinalAwaiter {
    bool await_ready() noexcept { return false; }
    std::coroutine_handle<> await_suspend(handle_t h) noexcept {
      auto cont = h.promise().continuation;
      return cont ? cont : std::noop_coroutine();
    }
    void await_resume() noexcept {}
  };

  struct promise_type {
    std::exception_ptr exc;
    std::coroutine_handle<> continuation;

    Task get_return_object() { return Task(handle_t::from_promise(*this)); }
    std::suspend_always initial_suspend() noexcept { return {}; }
    FinalAwaiter final_suspend() noexcept { return {}; }
    void return_void() {}
    void unhandled_exception() { exc = std::current_exception(); }
  };

  Task() = default;
  explicit Task(handle_t h) : h_(h) {}
  Task(Task&& o) noexcept : h_(std::exchange(o.h_, {})) {}
  Task& operator=(Task&& o) noexcept {
    if (this != &o) {
      destroy();
      h_ = std::exchange(o.h_, {});
    }
    return *this;
  }
  Task(const Task&) = delete;
  Task& operator=(const Task&) = delete;
  ~Task() { destroy(); }

  bool done() const { return !h_ || h_.done(); }
  handle_t handle() const { return h_; }

  bool await_ready() { return false; }
  std::coroutine_handle<> await_suspend(std::coroutine_handle<> parent) {
    h_.promise().continuation = parent;
    return h_;
  }
  void await_resume() {
    if (h_.promise().exc) std::rethrow_exception(h_.promise().exc);
  }

  void rethrow_if_failed() const {
    if (h_ && h_.done() && h_.promise().exc) std::rethrow_exception(h_.promise().exc);
  }

 private:
  void destroy() {
    if (h_) h_.destroy();
  }
  handle_t h_;
};

}  // namespace ringsim::rt
