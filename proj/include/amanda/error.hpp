// Copyright 2026 The Amanda Authors. All Rights Reserved.
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

namespace amanda {

// Base for every error the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatch between operands; the message names the op.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Input data violates a documented precondition or schema.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed file or payload.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace amanda
