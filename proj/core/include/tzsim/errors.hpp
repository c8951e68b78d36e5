//
// Copyright 2026 The tzsim Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef TZSIM_ERRORS_HPP_
#define TZSIM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace tzsim {

// Simulator misuse and configuration problems. Architectural faults raised by
// the simulated hardware are values (see Fault), not exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TZSIM_DEFINE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

TZSIM_DEFINE_ERROR(OverlapError);
TZSIM_DEFINE_ERROR(BoundsError);
TZSIM_DEFINE_ERROR(UnmappedError);
TZSIM_DEFINE_ERROR(ConfigError);
TZSIM_DEFINE_ERROR(StateError);
TZSIM_DEFINE_ERROR(InputDataError);
TZSIM_DEFINE_ERROR(PoolExhausted);
TZSIM_DEFINE_ERROR(PoolBoundsError);
TZSIM_DEFINE_ERROR(ProtocolMaxExceeded);
TZSIM_DEFINE_ERROR(AccountingError);
TZSIM_DEFINE_ERROR(UnknownApp);
TZSIM_DEFINE_ERROR(DuplicateApp);
TZSIM_DEFINE_ERROR(DoubleFree);

#undef TZSIM_DEFINE_ERROR

}  // namespace tzsim

#endif  // TZSIM_ERRORS_HPP_
