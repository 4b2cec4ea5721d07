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

#include "preadd/error.hpp"

namespace preadd {

const char *to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::EmptyVector: return "EmptyVector";
    case ErrorKind::AllInfinite: return "AllInfinite";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::InvalidK: return "InvalidK";
    case ErrorKind::InvalidP: return "InvalidP";
    case ErrorKind::ContextMismatch: return "ContextMismatch";
    case ErrorKind::DegenerateDistribution: return "DegenerateDistribution";
    case ErrorKind::BackendError: return "BackendError";
    case ErrorKind::RemoteUnavailable: return "RemoteUnavailable";
    case ErrorKind::TokenOutOfRange: return "TokenOutOfRange";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::SuffixViolation: return "SuffixViolation";
    case ErrorKind::EmptyBank: return "EmptyBank";
    case ErrorKind::DiscriminatorError: return "DiscriminatorError";
    case ErrorKind::ScorerUnavailable: return "ScorerUnavailable";
    case ErrorKind::RateLimited: return "RateLimited";
    case ErrorKind::ZeroPronounMass: return "ZeroPronounMass";
    case ErrorKind::PronounUnresolved: return "PronounUnresolved";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::ClassifierUnavailable: return "ClassifierUnavailable";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::MissingMetricBackend: return "MissingMetricBackend";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::OverlapError: return "OverlapError";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::MissingMetricBackend:
    case ErrorKind::InvalidK:
    case ErrorKind::InvalidP:
    case ErrorKind::PronounUnresolved:
        return 2;
    case ErrorKind::RemoteUnavailable:
    case ErrorKind::BackendError:
    case ErrorKind::ScorerUnavailable:
    case ErrorKind::RateLimited:
    case ErrorKind::ClassifierUnavailable:
    case ErrorKind::DiscriminatorError:
        return 3;
    case ErrorKind::SchemaError:
    case ErrorKind::OverlapError:
    case ErrorKind::IoError:
    case ErrorKind::EmptyCorpus:
    case ErrorKind::EmptyBank:
    case ErrorKind::EmptyInput:
    case ErrorKind::TokenOutOfRange:
    case ErrorKind::SuffixViolation:
        return 4;
    default:
        return 5;
    }
}

} // namespace preadd
