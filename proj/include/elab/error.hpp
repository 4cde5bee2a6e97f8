// Copyright 2026 The emergence-lab Authors
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

#ifndef ELAB_ERROR_HPP_
#define ELAB_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace elab {

enum class ErrorKind {
  kInput,           // malformed argument (out-of-range symbol, bad shape)
  kInvariant,       // a domain type invariant does not hold
  kDepth,           // a point prefix is not defined deep enough
  kSize,            // a configured cardinality cap was exceeded
  kOverflow,        // checked integer arithmetic overflowed
  kSchedule,        // itinerary constraints are infeasible at the caps
  kSampling,        // rejection sampling ran out of attempts
  kAlignment,       // a prefix length is not a block boundary
  kRepresentation,  // a target set is not representable at the depth cap
  kConfig,          // experiment configuration problem
  kIo,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries the module and operation that
// produced it, so the CLI can serialize it without string parsing.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, std::string operation,
        const std::string& detail)
      : std::runtime_error(detail),
        kind_(kind),
        module_(std::move(module)),
        operation_(std::move(operation)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& module() const { return module_; }
  const std::string& operation() const { return operation_; }
  std::string detail() const { return what(); }

 private:
  ErrorKind kind_;
  std::string module_;
  std::string operation_;
};

}  // namespace elab

#endif  // ELAB_ERROR_HPP_
