/*
 * Copyright 2026 The ICONS Authors.
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
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <stdexcept>
#include <string>

namespace icons {

/// Base class for every error the library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem-level failure: open, read, write, missing file.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

/// What exactly is wrong with an on-disk artifact.
enum class FormatIssue {
  bad_magic,
  bad_version,
  bad_dtype,
  bad_header,
  truncated,
  checksum_mismatch,
  non_finite,
};

/// Structural problem in an on-disk artifact (shard, table, manifest).
class FormatError : public Error {
 public:
  FormatError(FormatIssue issue, const std::string& what)
      : Error(what), issue_(issue) {}
  FormatIssue issue() const noexcept { return issue_; }

 private:
  FormatIssue issue_;
};

/// Caller-side contract violation: shapes, flags, ranges, config values.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

}  // namespace icons
