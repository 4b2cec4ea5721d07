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

#include "preadd/cli/dataset.hpp"

#include "preadd/error.hpp"
#include "preadd/ngram.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace preadd::cli {

namespace {

std::string trim(std::string s) {
    const auto lo = s.find_first_not_of(" \t\r\n");
    if (lo == std::string::npos) {
        return {};
    }
    const auto hi = s.find_last_not_of(" \t\r\n");
    return s.substr(lo, hi - lo + 1);
}

bool ends_with(const std::string &s, const std::string &suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string row_ref(const std::string &path, std::size_t row) {
    return path + " row " + std::to_string(row);
}

// Field access over either a JSON object or a CSV row with a header.
struct RowView {
    const nlohmann::json *obj = nullptr;
    const std::vector<std::string> *cells = nullptr;
    const std::map<std::string, std::size_t> *header = nullptr;

    bool has(const std::string &key) const {
        if (obj) {
            return obj->contains(key) && !(*obj)[key].is_null();
        }
        auto it = header->find(key);
        return it != header->end() && it->second < cells->size() && !trim((*cells)[it->second]).empty();
    }

    std::string text(const std::string &key) const {
        if (obj) {
            const auto &v = (*obj)[key];
            if (v.is_string()) {
                return v.get<std::string>();
            }
            if (v.is_number_integer()) {
                return std::to_string(v.get<long long>());
            }
            return v.dump();
        }
        return (*cells)[header->at(key)];
    }

    double number(const std::string &key) const {
        if (obj) {
            const auto &v = (*obj)[key];
            if (v.is_number()) {
                return v.get<double>();
            }
        }
        return std::stod(text(key));
    }
};

bool is_ambiguous_template(std::string v) {
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    v.erase(std::remove_if(v.begin(), v.end(), [](char c) { return c == ' ' || c == '-' || c == '_'; }), v.end());
    return v == "1" || v == "type1";
}

} // namespace

std::vector<std::string> read_lines(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::IoError, "cannot open " + path);
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

std::vector<std::vector<std::string>> read_csv(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::IoError, "cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string data = ss.str();

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const char c = data[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < data.size() && data[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            field_started = false;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < data.size() && data[i + 1] == '\n') {
                ++i;
            }
            row.push_back(std::move(field));
            field.clear();
            field_started = false;
            if (!(row.size() == 1 && row[0].empty())) {
                rows.push_back(std::move(row));
            }
            row.clear();
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (quoted) {
        throw Error(ErrorKind::SchemaError, path + ": unterminated quoted field");
    }
    if (field_started || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

IngestResult ingest_dataset(const std::string &path, Task task) {
    IngestResult out;
    std::set<std::string> seen;

    auto accept = [&](const RowView &row, std::size_t rowno) {
        if (!row.has("id")) {
            throw Error(ErrorKind::SchemaError, row_ref(path, rowno) + ": missing id");
        }
        if (!row.has("prompt")) {
            throw Error(ErrorKind::SchemaError, row_ref(path, rowno) + ": missing prompt");
        }
        PromptRecord r;
        r.id = trim(row.text("id"));
        r.prompt = row.text("prompt");
        if (trim(r.prompt).empty()) {
            throw Error(ErrorKind::SchemaError, row_ref(path, rowno) + ": empty prompt");
        }
        if (!seen.insert(r.id).second) {
            throw Error(ErrorKind::SchemaError, row_ref(path, rowno) + ": duplicate id '" + r.id + "'");
        }
        if (row.has("occupation")) {
            r.occupation = trim(row.text("occupation"));
        }
        if (row.has("stereotype_label")) {
            const std::string label = trim(row.text("stereotype_label"));
            if (label != "stereotypical" && label != "anti-stereotypical") {
                throw Error(ErrorKind::SchemaError,
                            row_ref(path, rowno) + ": stereotype_label must be stereotypical or anti-stereotypical");
            }
            r.stereotype_label = label;
        }
        if (row.has("source_score")) {
            try {
                r.source_score = row.number("source_score");
            } catch (const std::exception &) {
                throw Error(ErrorKind::SchemaError, row_ref(path, rowno) + ": source_score is not a number");
            }
        }
        if (task == Task::Bias) {
            if (!r.occupation || r.occupation->empty()) {
                throw Error(ErrorKind::SchemaError, row_ref(path, rowno) + ": bias prompts need an occupation");
            }
            if (row.has("template_type") && is_ambiguous_template(row.text("template_type"))) {
                out.skipped.push_back({rowno, r.id, "type-1 template (ambiguous pronoun referent)"});
                return;
            }
        }
        out.records.push_back(std::move(r));
    };

    if (ends_with(path, ".csv")) {
        const auto rows = read_csv(path);
        if (rows.empty()) {
            throw Error(ErrorKind::SchemaError, path + ": no header row");
        }
        std::map<std::string, std::size_t> header;
        for (std::size_t i = 0; i < rows[0].size(); ++i) {
            header[trim(rows[0][i])] = i;
        }
        for (std::size_t r = 1; r < rows.size(); ++r) {
            if (rows[r].size() != rows[0].size()) {
                throw Error(ErrorKind::SchemaError, row_ref(path, r) + ": expected " + std::to_string(rows[0].size()) +
                                                        " fields, found " + std::to_string(rows[r].size()));
            }
            accept(RowView{nullptr, &rows[r], &header}, r);
        }
    } else {
        const auto lines = read_lines(path);
        std::size_t rowno = 0;
        for (const auto &line : lines) {
            if (trim(line).empty()) {
                continue;
            }
            ++rowno;
            nlohmann::json obj;
            try {
                obj = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception &e) {
                throw Error(ErrorKind::SchemaError, row_ref(path, rowno) + ": " + e.what());
            }
            if (!obj.is_object()) {
                throw Error(ErrorKind::SchemaError, row_ref(path, rowno) + ": expected a JSON object");
            }
            accept(RowView{&obj, nullptr, nullptr}, rowno);
        }
    }
    return out;
}

void check_bank_overlap(const std::vector<BankEntry> &bank, const std::vector<PromptRecord> &prompts) {
    std::set<std::string> test;
    for (const auto &p : prompts) {
        test.insert(trim(p.prompt));
    }
    std::vector<std::string> shared;
    for (const auto &b : bank) {
        if (test.count(trim(b.text))) {
            shared.push_back(b.text);
        }
    }
    if (!shared.empty()) {
        std::string msg = std::to_string(shared.size()) + " prefix bank line(s) also appear as test prompts:";
        for (const auto &s : shared) {
            msg += "\n  " + s;
        }
        throw Error(ErrorKind::OverlapError, msg);
    }
}

std::set<std::string> read_word_set(const std::string &path) {
    std::set<std::string> out;
    for (const auto &line : read_lines(path)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        for (auto w : split_whitespace(t)) {
            std::transform(w.begin(), w.end(), w.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            out.insert(std::move(w));
        }
    }
    return out;
}

std::vector<std::pair<std::string, std::vector<std::pair<std::string, double>>>>
load_pfemale_table(const std::string &path) {
    const auto rows = read_csv(path);
    if (rows.empty() || rows[0].size() < 2) {
        throw Error(ErrorKind::SchemaError, path + ": expected a header with occupation and method columns");
    }
    if (trim(rows[0][0]) != "occupation") {
        throw Error(ErrorKind::SchemaError, path + ": first column must be 'occupation'");
    }
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, double>>>> out;
    for (std::size_t c = 1; c < rows[0].size(); ++c) {
        out.emplace_back(trim(rows[0][c]), std::vector<std::pair<std::string, double>>{});
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != rows[0].size()) {
            throw Error(ErrorKind::SchemaError, row_ref(path, r) + ": wrong number of fields");
        }
        const std::string occupation = trim(rows[r][0]);
        for (std::size_t c = 1; c < rows[r].size(); ++c) {
            double p = 0.0;
            try {
                std::size_t used = 0;
                const std::string cell = trim(rows[r][c]);
                p = std::stod(cell, &used);
                if (used != cell.size()) {
                    throw std::invalid_argument(cell);
                }
            } catch (const std::exception &) {
                throw Error(ErrorKind::SchemaError, row_ref(path, r) + ": '" + rows[r][c] + "' is not a number");
            }
            if (!(p >= 0.0 && p <= 1.0)) {
                throw Error(ErrorKind::SchemaError, row_ref(path, r) + ": probability outside [0, 1]");
            }
            out[c - 1].second.emplace_back(occupation, p);
        }
    }
    return out;
}

} // namespace preadd::cli
