#pragma once

#include <cassert>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace gridbench {

/// Error payload: a module-specific code plus human-readable context.
template <typename E>
struct Failure {
  E code;
  std::string detail;
};

/// Value-or-failure return for operations on untrusted input (decoders,
/// parsers, config). Check ok() before value().
template <typename T, typename E>
class [[nodiscard]] Result {
 public:
  Result(T value) : v_(std::move(value)) {}
  Result(Failure<E> failure) : v_(std::move(failure)) {}
  Result(E code, std::string detail = {})
      : v_(Failure<E>{code, std::move(detail)}) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  T& value() & {
    assert(ok());
    return std::get<T>(v_);
  }
  const T& value() const& {
    assert(ok());
    return std::get<T>(v_);
  }
  T&& take() && {
    assert(ok());
    return std::get<T>(std::move(v_));
  }

  E error() const {
    assert(!ok());
    return std::get<Failure<E>>(v_).code;
  }
  const std::string& error_detail() const {
    assert(!ok());
    return std::get<Failure<E>>(v_).detail;
  }
  Failure<E> failure() const {
    assert(!ok());
    return std::get<Failure<E>>(v_);
  }

 private:
  std::variant<T, Failure<E>> v_;
};

/// Exception carrying a typed error code; thrown on contract violations of
/// programmatic APIs (as opposed to malformed external input).
template <typename E>
class CodedError : public std::runtime_error {
 public:
  CodedError(E code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  E code() const noexcept { return code_; }

 private:
  E code_;
};

}  // namespace gridbench
