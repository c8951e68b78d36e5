//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef TZSIM_FAULT_HPP_
#define TZSIM_FAULT_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace tzsim {

using Address = std::uint32_t;
using Word = std::uint32_t;

enum class FaultKind : std::uint8_t {
  kSecureFault,
  kDataBusError,
  kAchillesHeelAbort,
  kUnmapped,
};

enum class FaultSource : std::uint8_t {
  kSau,
  kAhb,
  kEntryCheck,
  kSimulator,
};

// The source is a function of the kind; there is no way to build a Fault
// with a mismatched pair.
constexpr FaultSource source_of(FaultKind kind) {
  switch (kind) {
    case FaultKind::kSecureFault:
      return FaultSource::kSau;
    case FaultKind::kDataBusError:
      return FaultSource::kAhb;
    case FaultKind::kAchillesHeelAbort:
      return FaultSource::kEntryCheck;
    case FaultKind::kUnmapped:
      break;
  }
  return FaultSource::kSimulator;
}

std::string_view to_string(FaultKind kind);
std::string_view to_string(FaultSource source);

class Fault {
 public:
  Fault(FaultKind kind, Address at, std::string detail)
      : kind_(kind), at_(at), detail_(std::move(detail)) {}

  static Fault secure_fault(Address at, std::string detail) {
    return {FaultKind::kSecureFault, at, std::move(detail)};
  }
  static Fault data_bus_error(Address at, std::string detail) {
    return {FaultKind::kDataBusError, at, std::move(detail)};
  }
  static Fault unmapped(Address at);

  FaultKind kind() const { return kind_; }
  FaultSource source() const { return source_of(kind_); }
  Address at() const { return at_; }
  const std::string& detail() const { return detail_; }

  bool operator==(const Fault&) const = default;

 private:
  FaultKind kind_;
  Address at_;
  std::string detail_;
};

// Either a value or the architectural fault that prevented it.
template <class T>
class [[nodiscard]] Result {
 public:
  Result(T value) : v_(std::move(value)) {}  // NOLINT(runtime/explicit)
  Result(Fault fault) : v_(std::move(fault)) {}  // NOLINT(runtime/explicit)

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return std::get<T>(v_); }
  T& value() & { return std::get<T>(v_); }
  T&& value() && { return std::get<T>(std::move(v_)); }

  const Fault& fault() const& { return std::get<Fault>(v_); }

 private:
  std::variant<T, Fault> v_;
};

using Status = Result<std::monostate>;

inline Status ok_status() { return Status(std::monostate{}); }

}  // namespace tzsim

#endif  // TZSIM_FAULT_HPP_
