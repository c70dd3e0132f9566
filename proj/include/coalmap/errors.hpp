/**
 * Copyright 2026, the coalmap authors
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

#ifndef COALMAP_ERRORS_HPP
#define COALMAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace coalmap {

/// Process exit codes used by the CLI.
enum ExitCode : int {
    kExitOk = 0,
    kExitBadConfig = 2,
    kExitIoFailure = 3,
    kExitDataInvariant = 4,
};

/// Invalid configuration: bad flags, malformed config files, bad parameters.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem / file-format failures.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Violated data invariant: dimension mismatch, degenerate geometry,
/// insufficient samples, out-of-bounds access.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace coalmap

#endif  // COALMAP_ERRORS_HPP
