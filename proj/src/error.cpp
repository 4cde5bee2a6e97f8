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

#include "elab/error.hpp"

namespace elab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInput: return "input";
    case ErrorKind::kInvariant: return "invariant";
    case ErrorKind::kDepth: return "depth";
    case ErrorKind::kSize: return "size";
    case ErrorKind::kOverflow: return "overflow";
    case ErrorKind::kSchedule: return "schedule";
    case ErrorKind::kSampling: return "sampling";
    case ErrorKind::kAlignment: return "alignment";
    case ErrorKind::kRepresentation: return "representation";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace elab
