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

// Prompt-set ingestion.
//
// JSONL: one object per line. CSV: UTF-8, comma separated, header row.
// Recognized fields:
//   id (required, unique)  prompt (required)  occupation  stereotype_label
//   source_score  template_type
// Bias prompts must carry an occupation. When template_type is present, bias
// rows of type 1 (pronoun referent ambiguous between the two entities) are
// skipped and reported.

#include "preadd/cli/config.hpp"
#include "preadd/prefixes.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace preadd::cli {

struct PromptRecord {
    std::string id;
    std::string prompt;
    std::optional<std::string> occupation;
    std::optional<std::string> stereotype_label; // stereotypical | anti-stereotypical
    std::optional<double> source_score;
};

struct SkippedRow {
    std::size_t row = 0; // 1-based data row
    std::string id;
    std::string reason;
};

struct IngestResult {
    std::vector<PromptRecord> records;
    std::vector<SkippedRow> skipped;
};

IngestResult ingest_dataset(const std::string &path, Task task);

// Throws OverlapError listing every bank line that is also a test prompt.
void check_bank_overlap(const std::vector<BankEntry> &bank, const std::vector<PromptRecord> &prompts);

// RFC 4180 subset: quoted fields, doubled quotes, CRLF. First row is the header.
std::vector<std::vector<std::string>> read_csv(const std::string &path);

std::vector<std::string> read_lines(const std::string &path);

// One word per line (or whitespace separated), lowercased; '#' starts a comment line.
std::set<std::string> read_word_set(const std::string &path);

// CSV with an occupation column followed by one column of female-pronoun
// probabilities per method. Returns method -> (occupation, p_female) records,
// methods in column order.
std::vector<std::pair<std::string, std::vector<std::pair<std::string, double>>>>
load_pfemale_table(const std::string &path);

} // namespace preadd::cli
