// Copyright 2026 The slideseg Authors. All Rights Reserved.
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

#pragma once

#include <stdexcept>
#include <string>

namespace slideseg {

/// Invalid argument, configuration value, or geometry. Maps to CLI exit code 2.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed array container, PNG, or sidecar file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem failure; the message carries the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The predictor ran but reported a failure for a tile.
class PredictionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken link to an external predictor: EOF, bad frame, version mismatch.
/// Maps to CLI exit code 4.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pipeline stage aborted. Carries the stage name; the message carries
/// patch/tile context from the underlying failure. Maps to CLI exit code 3.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace slideseg
