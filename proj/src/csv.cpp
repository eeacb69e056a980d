#include "sppa/csv.hpp"

#include <charconv>
#include <cmath>
#include <unordered_map>

#include "sppa/textio.hpp"

namespace sppa {

namespace {

struct LineReader {
  std::string_view text;
  std::string source;
  std::size_t at = 0;
  long line_no = 0;

  // Strips a UTF-8 BOM from the first line and trailing \r from every line.
  bool next(std::string_view& line) {
    while (at < text.size()) {
      std::size_t end = text.find('\n', at);
      if (end == std::string_view::npos) end = text.size();
      line = text.substr(at, end - at);
      at = end + 1;
      ++line_no;
      if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& message) const { throw DataError(message, source, line_no); }
};

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t at = 0;
  while (true) {
    const std::size_t comma = line.find(',', at);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(at));
      return out;
    }
    out.push_back(line.substr(at, comma - at));
    at = comma + 1;
  }
}

double parse_coord(LineReader& r, std::string_view field, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ptr != field.data() + field.size() || ec == std::errc::invalid_argument)
    r.fail(std::string("malformed ") + what + ": '" + std::string(field) + "'");
  if (ec == std::errc::result_out_of_range || !std::isfinite(v))
    r.fail(std::string("non-finite ") + what + ": '" + std::string(field) + "'");
  return v;
}

std::int64_t parse_id(LineReader& r, std::string_view field) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ptr != field.data() + field.size() || ec != std::errc{})
    r.fail("malformed id: '" + std::string(field) + "'");
  return v;
}

}  // namespace

PointDataset read_dataset_csv(std::string_view text, std::string_view source_name) {
  LineReader r{text, std::string(source_name)};
  std::string_view line;
  if (!r.next(line)) throw DataError("empty file", r.source);
  if (line != "id,x,y,category") r.fail("expected header 'id,x,y,category'");

  std::vector<PointRecord> records;
  std::vector<std::string> names;
  std::unordered_map<std::string, int> name_to_index;
  std::unordered_map<std::int64_t, long> seen_ids;
  while (r.next(line)) {
    const auto fields = split_fields(line);
    if (fields.size() != 4) r.fail("expected 4 fields, got " + std::to_string(fields.size()));
    PointRecord rec;
    rec.id = parse_id(r, fields[0]);
    rec.x = parse_coord(r, fields[1], "x coordinate");
    rec.y = parse_coord(r, fields[2], "y coordinate");
    if (fields[3].empty()) r.fail("empty category");
    if (auto [it, fresh] = seen_ids.emplace(rec.id, r.line_no); !fresh)
      r.fail("duplicate id " + std::to_string(rec.id) + " (first seen on line " +
             std::to_string(it->second) + ")");
    const std::string name(fields[3]);
    auto it = name_to_index.find(name);
    if (it == name_to_index.end()) {
      it = name_to_index.emplace(name, static_cast<int>(names.size())).first;
      names.push_back(name);
    }
    rec.category = it->second;
    records.push_back(rec);
  }
  if (records.empty()) throw DataError("no records", r.source);
  return PointDataset(std::move(records), std::move(names));
}

std::string write_dataset_csv(const PointDataset& ds) {
  std::string out = "id,x,y,category\n";
  for (const PointRecord& r : ds.records()) {
    out += std::to_string(r.id);
    out += ',';
    out += format_double(r.x);
    out += ',';
    out += format_double(r.y);
    out += ',';
    out += ds.category_name(r.category);
    out += '\n';
  }
  return out;
}

SplitAssignment read_split_csv(std::string_view text, std::string_view source_name,
                               std::uint64_t seed) {
  LineReader r{text, std::string(source_name)};
  std::string_view line;
  if (!r.next(line)) throw DataError("empty file", r.source);
  if (line != "id,split") r.fail("expected header 'id,split'");
  std::vector<std::pair<std::int64_t, Split>> entries;
  while (r.next(line)) {
    const auto fields = split_fields(line);
    if (fields.size() != 2) r.fail("expected 2 fields, got " + std::to_string(fields.size()));
    const std::int64_t id = parse_id(r, fields[0]);
    Split s;
    try {
      s = split_from_name(fields[1]);
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
    entries.emplace_back(id, s);
  }
  if (entries.empty()) throw DataError("no records", r.source);
  try {
    return SplitAssignment(std::move(entries), seed);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what(), r.source);
  }
}

std::string write_split_csv(const SplitAssignment& split) {
  std::string out = "id,split\n";
  for (const auto& [id, s] : split.entries()) {
    out += std::to_string(id);
    out += ',';
    out += split_name(s);
    out += '\n';
  }
  return out;
}

ProbTable read_prob_table_csv(std::string_view text, std::string_view source_name,
                              ProbSource source) {
  LineReader r{text, std::string(source_name)};
  std::string_view line;
  if (!r.next(line)) throw DataError("empty file", r.source);
  const auto header = split_fields(line);
  if (header.size() < 2 || header[0] != "id") r.fail("expected header 'id,p_0,...'");
  for (std::size_t c = 1; c < header.size(); ++c)
    if (header[c] != "p_" + std::to_string(c - 1)) r.fail("expected column p_" + std::to_string(c - 1));
  const int C = static_cast<int>(header.size()) - 1;
  ProbTable table(source, C);
  while (r.next(line)) {
    const auto fields = split_fields(line);
    if (fields.size() != header.size())
      r.fail("expected " + std::to_string(header.size()) + " fields, got " +
             std::to_string(fields.size()));
    const std::int64_t id = parse_id(r, fields[0]);
    std::vector<double> p(C);
    for (int c = 0; c < C; ++c) p[c] = parse_coord(r, fields[c + 1], "probability");
    try {
      table.insert(id, ProbVector(std::move(p)));
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
  }
  if (table.size() == 0) throw DataError("no records", r.source);
  return table;
}

std::string write_prob_table_csv(const ProbTable& table) {
  std::string out = "id";
  for (int c = 0; c < table.num_categories(); ++c) out += ",p_" + std::to_string(c);
  out += '\n';
  for (const auto& [id, p] : table.rows()) {
    out += std::to_string(id);
    for (int c = 0; c < table.num_categories(); ++c) {
      out += ',';
      out += format_double(p[c]);
    }
    out += '\n';
  }
  return out;
}

std::string write_global_clq_csv(const GlobalClqTable& table,
                                 const std::vector<std::string>& category_names) {
  const int C = table.num_categories();
  std::string out = "category";
  for (int c = 0; c < C; ++c) out += ",v_" + std::to_string(c);
  out += ",n_contributing\n";
  for (int row = 0; row < C; ++row) {
    out += category_names[row];
    for (int c = 0; c < C; ++c) {
      out += ',';
      out += format_double(table.rows[row][c]);
    }
    out += ',';
    out += std::to_string(table.contributing[row]);
    out += '\n';
  }
  return out;
}

GlobalClqTable read_global_clq_csv(std::string_view text, std::string_view source_name) {
  LineReader r{text, std::string(source_name)};
  std::string_view line;
  if (!r.next(line)) throw DataError("empty file", r.source);
  const auto header = split_fields(line);
  if (header.size() < 3 || header[0] != "category" || header.back() != "n_contributing")
    r.fail("expected header 'category,v_0,...,n_contributing'");
  const int C = static_cast<int>(header.size()) - 2;
  GlobalClqTable table;
  while (r.next(line)) {
    const auto fields = split_fields(line);
    if (fields.size() != header.size())
      r.fail("expected " + std::to_string(header.size()) + " fields");
    std::vector<double> row(C);
    for (int c = 0; c < C; ++c) row[c] = parse_coord(r, fields[c + 1], "value");
    table.rows.push_back(std::move(row));
    table.contributing.push_back(parse_id(r, fields.back()));
  }
  if (table.rows.size() != static_cast<std::size_t>(C))
    throw DataError("expected " + std::to_string(C) + " rows", r.source);
  return table;
}

std::string write_lclq_batch_csv(const std::vector<std::int64_t>& ids,
                                 const std::vector<LclqVector>& vectors) {
  std::string out = "id";
  const int C = vectors.empty() ? 0 : static_cast<int>(vectors.front().values.size());
  for (int c = 0; c < C; ++c) out += ",v_" + std::to_string(c);
  out += ",isolated\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += std::to_string(ids[i]);
    for (double v : vectors[i].values) {
      out += ',';
      out += format_double(v);
    }
    out += vectors[i].isolated ? ",1\n" : ",0\n";
  }
  return out;
}

}  // namespace sppa
