// Copyright 2026 The ocm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace ocm {

/// Malformed input: bad config keys, mismatched shapes, invalid arguments.
class InvalidArgument : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// A physical precondition does not hold (Nyquist violation, band overflow,
/// singular loss formula, undefined distribution).
class PhysicsError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

/// A configured resource cap (dense amplitude count) would be exceeded.
class ResourceError : public std::length_error {
   public:
    using std::length_error::length_error;
};

}  // namespace ocm
