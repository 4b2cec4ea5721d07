// Copyright 2026 The preadd Authors
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

namespace preadd {

enum class ErrorKind {
    // core decoding
    EmptyVector,
    AllInfinite,
    LengthMismatch,
    InvalidK,
    InvalidP,
    ContextMismatch,
    DegenerateDistribution,
    // backends
    BackendError,
    RemoteUnavailable,
    TokenOutOfRange,
    EmptyCorpus,
    // prefixes
    SuffixViolation,
    EmptyBank,
    // baselines
    DiscriminatorError,
    // metrics
    ScorerUnavailable,
    RateLimited,
    ZeroPronounMass,
    PronounUnresolved,
    EmptyInput,
    ClassifierUnavailable,
    DegenerateVariance,
    MissingMetricBackend,
    // cli
    ConfigError,
    SchemaError,
    OverlapError,
    IoError,
};

const char *to_string(ErrorKind kind);

// Process exit code for a failure of this kind:
// 2 config, 3 backend unreachable, 4 data, 5 internal invariant.
int exit_code_for(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept {
        return kind_;
    }

private:
    ErrorKind kind_;
};

} // namespace preadd
