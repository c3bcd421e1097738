/*
 * Copyright 2026 The aerint Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <string>

namespace aerint {

struct CommandOutcome {
    std::string output;
    std::string trace_csv;
    /// 0 ok, 3 when the run detected a violation or an out-of-tolerance cell.
    int status = 0;
};

/// Runs a CLI subcommand ("arb run", "arb tables", "sweep", "cam search",
/// "cam report", "demo"). `file_json` and `flags_json` are JSON objects keyed
/// by flag name; flags win. Configuration problems throw aerint::Error.
CommandOutcome run_command(const std::string& command, const std::string& file_json, const std::string& flags_json,
                           bool want_trace);

/// Runs every trace checker over a trace CSV; the output is a JSON array.
CommandOutcome check_trace_csv(const std::string& csv);

} // namespace aerint
