#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "promptreps/types.hpp"

namespace promptreps {

/// One generated token in multi-token modes.
struct TokenRecord {
  std::string token;  // decoded string, leading space preserved
  DenseVector dense;
  LogitMap logits;

  bool operator==(const TokenRecord&) const = default;
};

/// Encoder output for one text.
///
/// Logits come in one of two shapes: pre-filtered (token, value) pairs in
/// `logits`, or a full vocabulary-length vector in `vocab_logits` that must
/// be resolved against a vocabulary before sparsification.
struct RepresentationRecord {
  std::string id;
  DenseVector dense;
  LogitMap logits;
  std::vector<float> vocab_logits;
  std::vector<TokenRecord> tokens;

  bool has_vocab_logits() const { return !vocab_logits.empty(); }
  bool operator==(const RepresentationRecord&) const = default;
};

/// Parses one JSON Lines record. `line_number` is only used for messages.
/// Throws ParseError for malformed JSON, SchemaError for schema violations.
RepresentationRecord parse_record(std::string_view line, std::size_t line_number = 1);

/// Serializes to a single JSON line (no trailing newline). Floats are
/// written with enough digits to round-trip exactly.
std::string serialize_record(const RepresentationRecord& record);

/// Loads a JSONL record file, enforcing unique ids, a constant dense
/// dimension, and matching token sub-record dimensions.
std::vector<RepresentationRecord> load_records(const std::filesystem::path& path);

void write_records(const std::filesystem::path& path,
                   const std::vector<RepresentationRecord>& records);

/// Collection-level checks shared by load_records and in-memory callers.
void validate_collection(const std::vector<RepresentationRecord>& records);

}  // namespace promptreps
