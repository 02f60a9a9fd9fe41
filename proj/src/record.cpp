#include "promptreps/record.hpp"

#include <charconv>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "promptreps/error.hpp"

namespace promptreps {

namespace {

using nlohmann::json;

float to_float(const json& v, const char* field) {
  if (!v.is_number()) throw SchemaError(std::string(field) + " must contain only numbers");
  return static_cast<float>(v.get<double>());
}

DenseVector parse_dense(const json& obj, const std::string& where) {
  auto it = obj.find("dense");
  if (it == obj.end()) throw SchemaError(where + ": missing \"dense\"");
  if (!it->is_array()) throw SchemaError(where + ": \"dense\" must be an array");
  if (it->empty()) throw SchemaError(where + ": \"dense\" is empty");
  DenseVector out;
  out.reserve(it->size());
  for (const auto& v : *it) out.push_back(to_float(v, "dense"));
  return out;
}

LogitMap parse_logit_pairs(const json& obj) {
  LogitMap out;
  for (const auto& [token, value] : obj.items()) out[token] = to_float(value, "logits");
  return out;
}

void append_float(std::string& out, float v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void append_string(std::string& out, const std::string& s) { out += json(s).dump(); }

void append_floats(std::string& out, const std::vector<float>& values) {
  out += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    append_float(out, values[i]);
  }
  out += ']';
}

void append_logits(std::string& out, const LogitMap& logits) {
  out += '{';
  bool first = true;
  for (const auto& [token, value] : logits) {
    if (!first) out += ',';
    first = false;
    append_string(out, token);
    out += ':';
    append_float(out, value);
  }
  out += '}';
}

}  // namespace

RepresentationRecord parse_record(std::string_view line, std::size_t line_number) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_number);
  }
  if (!obj.is_object()) throw ParseError("record must be a JSON object", line_number);

  const std::string where = "line " + std::to_string(line_number);
  RepresentationRecord rec;
  auto id = obj.find("id");
  if (id == obj.end() || !id->is_string()) throw SchemaError(where + ": missing string \"id\"");
  rec.id = id->get<std::string>();
  if (rec.id.empty()) throw SchemaError(where + ": \"id\" is empty");
  rec.dense = parse_dense(obj, where);

  if (auto lg = obj.find("logits"); lg != obj.end() && !lg->is_null()) {
    if (lg->is_object()) {
      rec.logits = parse_logit_pairs(*lg);
    } else if (lg->is_array()) {
      rec.vocab_logits.reserve(lg->size());
      for (const auto& v : *lg) rec.vocab_logits.push_back(to_float(v, "logits"));
    } else {
      throw SchemaError(where + ": \"logits\" must be an object or an array");
    }
  }

  if (auto toks = obj.find("tokens"); toks != obj.end() && !toks->is_null()) {
    if (!toks->is_array()) throw SchemaError(where + ": \"tokens\" must be an array");
    for (const auto& t : *toks) {
      if (!t.is_object()) throw SchemaError(where + ": token entries must be objects");
      TokenRecord tr;
      auto tok = t.find("token");
      if (tok == t.end() || !tok->is_string()) {
        throw SchemaError(where + ": token entry missing string \"token\"");
      }
      tr.token = tok->get<std::string>();
      tr.dense = parse_dense(t, where + " token");
      if (tr.dense.size() != rec.dense.size()) {
        throw SchemaError(where + ": token dense dimension " + std::to_string(tr.dense.size()) +
                          " != record dimension " + std::to_string(rec.dense.size()));
      }
      if (auto lg = t.find("logits"); lg != t.end() && !lg->is_null()) {
        if (!lg->is_object()) throw SchemaError(where + ": token \"logits\" must be an object");
        tr.logits = parse_logit_pairs(*lg);
      }
      rec.tokens.push_back(std::move(tr));
    }
  }
  return rec;
}

std::string serialize_record(const RepresentationRecord& record) {
  std::string out = "{\"id\":";
  append_string(out, record.id);
  out += ",\"dense\":";
  append_floats(out, record.dense);
  out += ",\"logits\":";
  if (record.has_vocab_logits()) {
    append_floats(out, record.vocab_logits);
  } else {
    append_logits(out, record.logits);
  }
  if (!record.tokens.empty()) {
    out += ",\"tokens\":[";
    for (std::size_t i = 0; i < record.tokens.size(); ++i) {
      const auto& t = record.tokens[i];
      if (i) out += ',';
      out += "{\"token\":";
      append_string(out, t.token);
      out += ",\"dense\":";
      append_floats(out, t.dense);
      out += ",\"logits\":";
      append_logits(out, t.logits);
      out += '}';
    }
    out += ']';
  }
  out += '}';
  return out;
}

void validate_collection(const std::vector<RepresentationRecord>& records) {
  std::unordered_set<std::string> seen;
  std::size_t dim = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!seen.insert(r.id).second) throw SchemaError("duplicate record id \"" + r.id + "\"");
    if (i == 0) {
      dim = r.dense.size();
    } else if (r.dense.size() != dim) {
      throw SchemaError("record \"" + r.id + "\" has dense dimension " +
                        std::to_string(r.dense.size()) + ", collection dimension is " +
                        std::to_string(dim));
    }
    for (const auto& t : r.tokens) {
      if (t.dense.size() != dim) {
        throw SchemaError("record \"" + r.id + "\" token dense dimension mismatch");
      }
    }
  }
}

std::vector<RepresentationRecord> load_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open record file " + path.string());
  std::vector<RepresentationRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(parse_record(line, line_no));
    } catch (const SchemaError& e) {
      throw SchemaError(path.string() + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(e.detail(), e.line(), path.string());
    }
  }
  try {
    validate_collection(records);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return records;
}

void write_records(const std::filesystem::path& path,
                   const std::vector<RepresentationRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write record file " + path.string());
  for (const auto& r : records) out << serialize_record(r) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace promptreps
