/* Copyright 2026 The SceneLay Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SCENELAY_ERROR_HPP_
#define SCENELAY_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace scenelay {

// Raised for unrecoverable input or contract violations. Normal "absent"
// outcomes (OOV tokens, unusable captions) are std::optional instead.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Shape or arity mismatch between operands.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(what) {}
};

}  // namespace scenelay

#endif  // SCENELAY_ERROR_HPP_
