// Copyright 2026 The Countering Authors.
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
#include <vector>

namespace countering {

// Root of every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user-supplied input: unreadable files, schema mismatches, bad flags.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class NoGroupMatch : public ParseError {
 public:
  using ParseError::ParseError;
};

class NoRelation : public ParseError {
 public:
  using ParseError::ParseError;
};

class NoAlternativeGroup : public Error {
 public:
  using Error::Error;
};

class InsufficientSubtypes : public Error {
 public:
  using Error::Error;
};

// Completion transport failure. `retriable` separates transient network
// and server faults from requests that will never succeed as sent.
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what, bool retriable = true)
      : Error(what), retriable_(retriable) {}
  bool retriable() const { return retriable_; }

 private:
  bool retriable_;
};

class AuthError : public Error {
 public:
  using Error::Error;
};

// Raised by the offline client when a response would require the network.
class CacheMiss : public TransportError {
 public:
  explicit CacheMiss(const std::string& what) : TransportError(what, false) {}
};

class ScorerFailure : public Error {
 public:
  ScorerFailure(const std::string& candidate, const std::string& what)
      : Error("scorer failed on candidate '" + candidate + "': " + what),
        candidate_(candidate) {}
  const std::string& candidate() const { return candidate_; }

 private:
  std::string candidate_;
};

class MissingCounterset : public Error {
 public:
  using Error::Error;
};

class UnknownTask : public Error {
 public:
  using Error::Error;
};

class TaskClosed : public Error {
 public:
  using Error::Error;
};

class DuplicateAssignment : public Error {
 public:
  using Error::Error;
};

class NoOpenAssignment : public Error {
 public:
  using Error::Error;
};

class MalformedRecord : public Error {
 public:
  explicit MalformedRecord(std::vector<std::string> details)
      : Error("malformed record: " + join(details)), details_(std::move(details)) {}
  const std::vector<std::string>& details() const { return details_; }

 private:
  static std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
    return out;
  }
  std::vector<std::string> details_;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

}  // namespace countering
