/*
 * Copyright 2026 The es-unicycle Authors. All rights reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace esu {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates a documented precondition (k < 2, lambda >= rho, ...).
class ParameterError : public Error {
public:
  using Error::Error;
};

/// Query outside the domain on which a tabulated object is defined.
class RangeError : public Error {
public:
  using Error::Error;
};

/// Evaluation at a point where a function or derivative is not defined
/// (inside a guard band, across a zero of F1, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Quadrature or fitting failed to reach its tolerance.
class NumericError : public Error {
public:
  using Error::Error;
};

}  // namespace esu
