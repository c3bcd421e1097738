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

#include <stdexcept>
#include <string>

namespace aerint {

enum class ErrorCode {
    SchedulingInPast,
    ProtocolViolation,
    InvalidN,
    InvalidConfig,
    NotOneHot,
    IndexOutOfRange,
    WidthMismatch,
    FalseTiming,
    Unsatisfiable,
    InsufficientMargin,
    Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// C layer can map it onto a status without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::SchedulingInPast: return "SchedulingInPast";
    case ErrorCode::ProtocolViolation: return "ProtocolViolation";
    case ErrorCode::InvalidN: return "InvalidN";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NotOneHot: return "NotOneHot";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::FalseTiming: return "FalseTiming";
    case ErrorCode::Unsatisfiable: return "Unsatisfiable";
    case ErrorCode::InsufficientMargin: return "InsufficientMargin";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

} // namespace aerint
