// Copyright 2026 The EditNet Authors.
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

#include <cctype>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace editnet {

// A token is a lowercase, whitespace-free, non-empty string.
using TokenList = std::vector<std::string>;

struct Sentence {
  std::size_t index = 0;
  TokenList tokens;
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;

  std::size_t size() const { return sentences.size(); }
  const TokenList& tokens(std::size_t i) const { return sentences.at(i).tokens; }
};

struct ReferenceSummary {
  std::vector<TokenList> sentences;
};

struct Example {
  Document document;
  ReferenceSummary reference;
};

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Lowercases and splits on whitespace runs. Input is assumed pre-tokenized,
// so punctuation tokens such as "," or "." already stand on their own.
inline TokenList tokenize(std::string_view raw) {
  TokenList out;
  std::string current;
  for (char ch : raw) {
    const auto uc = static_cast<unsigned char>(ch);
    if (std::isspace(uc)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(static_cast<char>(std::tolower(uc)));
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

inline std::string join(const TokenList& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

// Builds a document from raw sentence strings, enforcing non-empty sentences
// and contiguous indices.
inline Document make_document(std::string id, const std::vector<std::string>& raw_sentences) {
  if (raw_sentences.empty()) throw DatasetError("empty article");
  Document doc{std::move(id), {}};
  doc.sentences.reserve(raw_sentences.size());
  for (const auto& raw : raw_sentences) {
    auto tokens = tokenize(raw);
    if (tokens.empty()) {
      throw DatasetError("empty sentence at position " + std::to_string(doc.sentences.size()));
    }
    doc.sentences.push_back({doc.sentences.size(), std::move(tokens)});
  }
  return doc;
}

inline ReferenceSummary make_reference(const std::vector<std::string>& raw_sentences) {
  if (raw_sentences.empty()) throw DatasetError("empty highlights");
  ReferenceSummary ref;
  for (const auto& raw : raw_sentences) {
    auto tokens = tokenize(raw);
    if (tokens.empty()) throw DatasetError("empty highlight sentence");
    ref.sentences.push_back(std::move(tokens));
  }
  return ref;
}

namespace detail {

inline std::vector<std::string> string_array(const nlohmann::json& record, const char* field) {
  auto it = record.find(field);
  if (it == record.end()) throw DatasetError(std::string("missing field \"") + field + "\"");
  if (!it->is_array()) throw DatasetError(std::string("field \"") + field + "\" is not an array");
  std::vector<std::string> out;
  for (const auto& item : *it) {
    if (!item.is_string()) throw DatasetError(std::string("field \"") + field + "\" holds a non-string");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace detail

// Parses one dataset record. Errors are prefixed with "line k: ".
inline Example parse_record(std::string_view line, std::size_t line_number) {
  const std::string prefix = "line " + std::to_string(line_number) + ": ";
  nlohmann::json record;
  try {
    record = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DatasetError(prefix + "malformed JSON (" + e.what() + ")");
  }
  if (!record.is_object()) throw DatasetError(prefix + "record is not an object");
  try {
    auto id_it = record.find("id");
    if (id_it == record.end()) throw DatasetError("missing field \"id\"");
    if (!id_it->is_string()) throw DatasetError("field \"id\" is not a string");
    auto article = detail::string_array(record, "article_sentences");
    auto highlights = detail::string_array(record, "highlights");
    return Example{make_document(id_it->get<std::string>(), article), make_reference(highlights)};
  } catch (const DatasetError& e) {
    throw DatasetError(prefix + e.what());
  }
}

struct RejectedRecord {
  std::size_t line = 0;
  std::string reason;
};

struct ScanResult {
  std::vector<Example> examples;
  std::vector<RejectedRecord> rejected;
};

// Lenient pass: every bad record is collected with its diagnostic instead of
// aborting. Blank lines are ignored.
inline ScanResult scan_dataset(std::istream& in) {
  ScanResult result;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      result.examples.push_back(parse_record(line, line_number));
    } catch (const DatasetError& e) {
      result.rejected.push_back({line_number, e.what()});
    }
  }
  return result;
}

// Strict load: the first bad record aborts with its diagnostic.
inline std::vector<Example> load_dataset(std::istream& in) {
  std::vector<Example> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_record(line, line_number));
  }
  return out;
}

inline std::vector<Example> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset " + path);
  return load_dataset(in);
}

inline nlohmann::json to_json(const Example& ex) {
  nlohmann::json article = nlohmann::json::array();
  for (const auto& s : ex.document.sentences) article.push_back(join(s.tokens));
  nlohmann::json highlights = nlohmann::json::array();
  for (const auto& s : ex.reference.sentences) highlights.push_back(join(s));
  return {{"id", ex.document.id}, {"article_sentences", article}, {"highlights", highlights}};
}

// Canonical form: one record per line, tokens joined by single spaces.
inline void write_dataset(std::ostream& out, const std::vector<Example>& examples) {
  for (const auto& ex : examples) out << to_json(ex).dump() << '\n';
}

inline void write_dataset(const std::string& path, const std::vector<Example>& examples) {
  std::ofstream out(path);
  if (!out) throw DatasetError("cannot write dataset " + path);
  write_dataset(out, examples);
}

}  // namespace editnet
