// Copyright 2026 The dplda Authors
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

#ifndef DPLDA_ERROR_HPP_
#define DPLDA_ERROR_HPP_

#include <cstddef>
#include <iostream>
#include <stdexcept>
#include <string>

namespace dplda {

/// Malformed input file. line() is 1-based, 0 when not applicable.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " +
                                           what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The removed mass N reaches a topic's smoothed word total, so the
/// neighboring sampling distribution is undefined.
class DegenerateCorpus : public std::runtime_error {
 public:
  DegenerateCorpus(std::size_t topic, double denominator, double removed)
      : std::runtime_error(
            "degenerate corpus: topic " + std::to_string(topic) +
            " has smoothed word total " + std::to_string(denominator) +
            " <= removed mass " + std::to_string(removed)),
        topic_(topic) {}

  std::size_t topic() const { return topic_; }

 private:
  std::size_t topic_;
};

namespace detail {

inline bool& warnings_enabled() {
  static bool enabled = true;
  return enabled;
}

inline void warn(const std::string& msg) {
  if (warnings_enabled()) std::clog << "warning: " << msg << '\n';
}

}  // namespace detail

/// Silences library warnings (tests and sweeps use this).
inline void set_warnings_enabled(bool enabled) {
  detail::warnings_enabled() = enabled;
}

}  // namespace dplda

#endif  // DPLDA_ERROR_HPP_
