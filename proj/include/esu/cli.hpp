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

#include <iosfwd>
#include <string>
#include <vector>

namespace esu::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kDiverged = 3,
  kCompareFailed = 4,
  kDegenerate = 5,
};

/// Entry point of `es-unicycle`. args excludes the program name. Errors are
/// reported as one `es-unicycle: error kind=<kind> reason="..."` line on err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace esu::cli
