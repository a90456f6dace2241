#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace critns {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Thrown when a time integration produces non-finite or overflowing
/// coefficients. This is a statement about the discretization, never about
/// the PDE.
class Unresolved : public Error {
 public:
  Unresolved(const std::string& what, double time)
      : Error("unresolved at t=" + std::to_string(time) + ": " + what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

using WarningHandler = std::function<void(const std::string&)>;

namespace detail {
inline std::mutex& warning_mutex() {
  static std::mutex m;
  return m;
}
inline WarningHandler& warning_handler() {
  static WarningHandler h = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
  return h;
}
}  // namespace detail

inline void warn(const std::string& msg) {
  std::lock_guard lock(detail::warning_mutex());
  if (detail::warning_handler()) detail::warning_handler()(msg);
}

inline WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(detail::warning_mutex());
  return std::exchange(detail::warning_handler(), std::move(handler));
}

/// Collects warnings for the lifetime of the object instead of printing them.
class WarningCapture {
 public:
  WarningCapture()
      : previous_(set_warning_handler([this](const std::string& m) { messages_.push_back(m); })) {}
  ~WarningCapture() { set_warning_handler(std::move(previous_)); }
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
  WarningHandler previous_;
};

}  // namespace critns
