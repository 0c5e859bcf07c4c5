// Copyright 2026 The dplda Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// CSV and JSON artifacts: topic models, privacy ledgers.

#ifndef DPLDA_IO_HPP_
#define DPLDA_IO_HPP_

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "dplda/cgs.hpp"
#include "dplda/error.hpp"
#include "dplda/privacy.hpp"

namespace dplda {

/// Shortest representation that parses back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("cannot format double");
  return std::string(buf, p);
}

inline std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

/// Splits RFC 4180 records. Quoted fields may contain commas, doubled quotes
/// and line breaks.
inline std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  std::size_t line = 1;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) throw ParseError("stray quote in CSV field", line);
        quoted = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        break;
      case '\r':
        break;
      case '\n':
        row.push_back(std::move(field));
        field.clear();
        rows.push_back(std::move(row));
        row.clear();
        any = false;
        ++line;
        break;
      default:
        field += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted CSV field", line);
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// K rows of phi under a header row of vocabulary words.
inline void write_model_csv(const TopicModel& model, std::ostream& out) {
  const auto& words = model.vocab.words();
  for (std::size_t t = 0; t < words.size(); ++t) {
    if (t) out << ',';
    out << csv_escape(words[t]);
  }
  out << '\n';
  for (const auto& row : model.phi) {
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (t) out << ',';
      out << format_double(row[t]);
    }
    out << '\n';
  }
}

/// Reads a model CSV. Hyperparameters other than K are not stored in the CSV
/// and are taken from `hyper`.
inline TopicModel read_model_csv(std::istream& in, Hyperparams hyper) {
  auto rows = parse_csv(in);
  if (rows.size() < 2) throw ParseError("model CSV needs a header and >= 1 topic row", 0);
  TopicModel model;
  model.vocab = Vocabulary(rows[0]);
  const std::size_t v = rows[0].size();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != v) {
      throw ParseError("topic row has " + std::to_string(rows[i].size()) +
                           " columns, expected " + std::to_string(v),
                       i + 1);
    }
    std::vector<double> phi(v);
    for (std::size_t t = 0; t < v; ++t) {
      const auto& f = rows[i][t];
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), phi[t]);
      if (ec != std::errc() || p != f.data() + f.size() || !(phi[t] >= 0.0)) {
        throw ParseError("bad probability '" + f + "'", i + 1);
      }
    }
    model.phi.push_back(std::move(phi));
  }
  hyper.num_topics = model.phi.size();
  model.hyper = hyper;
  return model;
}

inline void write_ledger_csv(const std::vector<LedgerRow>& history, std::ostream& out) {
  out << "iteration,max_cumulative_eps,mean_cumulative_eps\n";
  for (const auto& row : history) {
    out << row.iteration << ',' << format_double(row.max_cumulative) << ','
        << format_double(row.mean_cumulative) << '\n';
  }
}

inline nlohmann::json ledger_summary(const PrivacyLedger& ledger) {
  return {
      {"level", ledger.level().name()},
      {"N", ledger.level().removed},
      {"total_eps", ledger.total()},
      {"n_iters", ledger.iterations_recorded()},
      {"units", "nats"},
      {"composition",
       "sequential within each token position, parallel (max) across positions"},
      {"note",
       "accumulated per token position; grouping by word type or by removed "
       "document is not applied"},
  };
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  writer(out);
  if (!out) throw IoError("error while writing " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace dplda

#endif  // DPLDA_IO_HPP_
