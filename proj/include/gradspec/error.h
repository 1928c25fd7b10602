// Copyright 2026 The gradspec Authors.
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

#ifndef GRADSPEC_ERROR_H_
#define GRADSPEC_ERROR_H_

#include <stdexcept>
#include <string>

namespace gradspec {

// All library failures are reported as gradspec::Error. The message starts
// with a short stable phrase ("bad magic", "truncated payload", ...) that
// callers and tests may match on.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

}  // namespace gradspec

#endif  // GRADSPEC_ERROR_H_
