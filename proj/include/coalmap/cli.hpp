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

#ifndef COALMAP_CLI_HPP
#define COALMAP_CLI_HPP

#include <string>
#include <vector>

namespace coalmap::cli {

/// Runs one subcommand (classify, compare, assess, stats, synth) given
/// argv-style arguments without the program name. Returns the process
/// exit code; failures emit one machine-parsable line on stderr
/// ("error: <CODE>: message") and remove partially written outputs.
int run(const std::vector<std::string>& args);

int main(int argc, char** argv);

}  // namespace coalmap::cli

#endif  // COALMAP_CLI_HPP
