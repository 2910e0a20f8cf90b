#include "lapoleaf/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace lapoleaf {

std::string to_string(TaskMode mode) {
  return mode == TaskMode::classification ? "classification" : "regression";
}

TaskMode task_mode_from_string(const std::string& name) {
  if (name == "classification") return TaskMode::classification;
  if (name == "regression") return TaskMode::regression;
  throw ValidationError("unknown mode '" + name + "'");
}

std::size_t Dataset::labeled_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(label.begin(), label.end(), [](const auto& l) { return l.has_value(); }));
}

void Dataset::append(std::span<const double> x, std::size_t population,
                     std::optional<double> known) {
  for (double v : x) {
    if (!std::isfinite(v)) throw ValidationError("non-finite feature value");
  }
  if (population == 0) throw ValidationError("population must be positive");
  features.append_row(x);
  pop.push_back(population);
  label.push_back(known);
}

namespace {

bool row_less(std::span<const double> a, std::span<const double> b) {
  // -0.0 and 0.0 compare equal here, which is what distance 0 means.
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool row_equal(std::span<const double> a, std::span<const double> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

void validate_values(const Dataset& data) {
  const std::size_t n = data.size();
  if (n == 0) throw ValidationError("dataset is empty");
  if (data.dims() == 0) throw ValidationError("dataset has no feature columns");
  if (data.pop.size() != n || data.label.size() != n) {
    throw ValidationError("dataset arrays disagree in length");
  }
  for (double v : data.features.values()) {
    if (!std::isfinite(v)) throw ValidationError("non-finite feature value");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (data.pop[i] == 0) {
      throw ValidationError("population of row " + std::to_string(i) + " is zero");
    }
    const auto& l = data.label[i];
    if (!l) continue;
    if (!std::isfinite(*l)) {
      throw ValidationError("non-finite label at row " + std::to_string(i));
    }
    if (data.mode == TaskMode::classification) {
      const double k = *l;
      if (k < 0 || k != std::floor(k) ||
          k >= static_cast<double>(data.num_classes())) {
        throw ValidationError("class id out of range at row " + std::to_string(i));
      }
    }
  }
}

void validate(const Dataset& data) {
  validate_values(data);
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return row_less(data.features.row(a), data.features.row(b));
  });
  for (std::size_t k = 1; k < idx.size(); ++k) {
    if (row_equal(data.features.row(idx[k - 1]), data.features.row(idx[k]))) {
      throw ValidationError("rows " + std::to_string(std::min(idx[k - 1], idx[k])) +
                            " and " + std::to_string(std::max(idx[k - 1], idx[k])) +
                            " have identical features; merge duplicates first");
    }
  }
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// Comma split with double-quote support ("" escapes a quote inside a field).
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) {
    throw ValidationError("malformed row at line " + std::to_string(line_no) +
                          ": unterminated quote");
  }
  cells.push_back(trim(cur));
  return cells;
}

double parse_number(const std::string& cell, std::size_t line_no, const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (cell.empty() || ec != std::errc{} || ptr != end) {
    throw ValidationError("malformed row at line " + std::to_string(line_no) + ": column '" +
                          column + "' value '" + cell + "' is not a number");
  }
  if (!std::isfinite(value)) {
    throw ValidationError("non-finite value at line " + std::to_string(line_no) +
                          " (column '" + column + "')");
  }
  return value;
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "?"; }

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ValidationError("column '" + name + "' not found in header");
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

CsvTable read_csv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv_line(line, line_no);
      break;
    }
  }
  if (header.empty()) throw ValidationError("CSV input has no header line");

  std::optional<std::size_t> label_col, truth_col, pop_col;
  if (schema.label_column) label_col = column_index(header, *schema.label_column);
  if (schema.truth_column) truth_col = column_index(header, *schema.truth_column);
  if (schema.pop_column) pop_col = column_index(header, *schema.pop_column);

  std::vector<std::size_t> feature_cols;
  if (!schema.feature_columns.empty()) {
    for (const auto& name : schema.feature_columns) {
      feature_cols.push_back(column_index(header, name));
    }
  } else {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c != label_col && c != truth_col && c != pop_col) feature_cols.push_back(c);
    }
  }
  if (feature_cols.empty()) throw ValidationError("CSV input has no feature columns");

  struct RawRow {
    std::vector<double> x;
    std::size_t pop = 1;
    std::string label, truth;
  };
  std::vector<RawRow> rows;
  std::vector<std::size_t> row_lines;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line, line_no);
    if (cells.size() != header.size()) {
      throw ValidationError("malformed row at line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, found " +
                            std::to_string(cells.size()));
    }
    RawRow row;
    row.x.reserve(feature_cols.size());
    for (std::size_t c : feature_cols) row.x.push_back(parse_number(cells[c], line_no, header[c]));
    if (pop_col) {
      const double p = parse_number(cells[*pop_col], line_no, header[*pop_col]);
      if (p < 1 || p != std::floor(p)) {
        throw ValidationError("malformed row at line " + std::to_string(line_no) +
                              ": population must be a positive integer");
      }
      row.pop = static_cast<std::size_t>(p);
    }
    if (label_col) row.label = cells[*label_col];
    if (truth_col) row.truth = cells[*truth_col];
    rows.push_back(std::move(row));
    row_lines.push_back(line_no);
  }
  if (rows.empty()) throw ValidationError("CSV input has no data rows");

  CsvTable table;
  Dataset& data = table.data;
  data.mode = schema.mode;
  if (schema.mode == TaskMode::classification) {
    if (!schema.classes.empty()) {
      data.class_names = schema.classes;
    } else {
      std::set<std::string> seen;
      for (const auto& r : rows) {
        if (!is_missing(r.label)) seen.insert(r.label);
        if (!is_missing(r.truth)) seen.insert(r.truth);
      }
      data.class_names.assign(seen.begin(), seen.end());
    }
  }

  auto encode = [&](const std::string& cell, std::size_t ln,
                    const std::string& column) -> std::optional<double> {
    if (is_missing(cell)) return std::nullopt;
    if (schema.mode == TaskMode::regression) return parse_number(cell, ln, column);
    const auto it = std::find(data.class_names.begin(), data.class_names.end(), cell);
    if (it == data.class_names.end()) {
      throw ValidationError("unknown class '" + cell + "' at line " + std::to_string(ln));
    }
    return static_cast<double>(it - data.class_names.begin());
  };

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    std::optional<double> known;
    if (label_col) known = encode(row.label, row_lines[r], header[*label_col]);
    data.append(row.x, row.pop, known);
    if (truth_col) table.truth.push_back(encode(row.truth, row_lines[r], header[*truth_col]));
  }
  validate_values(data);
  return table;
}

CsvTable load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  return read_csv(in, schema);
}

void write_csv(std::ostream& out, const Dataset& data) {
  std::ostringstream buf;
  buf.precision(17);
  for (std::size_t c = 0; c < data.dims(); ++c) buf << 'x' << c << ',';
  buf << "pop,label\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.features.row(i)) buf << v << ',';
    buf << data.pop[i] << ',';
    if (const auto& l = data.label[i]) {
      if (data.mode == TaskMode::classification) {
        buf << data.class_names[static_cast<std::size_t>(*l)];
      } else {
        buf << *l;
      }
    }
    buf << '\n';
  }
  out << buf.str();
}

// ---------------------------------------------------------------------------

MergeResult merge_duplicates(const Dataset& raw) {
  validate_values(raw);
  const std::size_t n = raw.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return row_less(raw.features.row(a), raw.features.row(b));
  });

  // group_of[r] = smallest raw index carrying the same features as r
  std::vector<std::size_t> group_of(n);
  for (std::size_t k = 0; k < n;) {
    std::size_t end = k + 1;
    while (end < n && row_equal(raw.features.row(idx[k]), raw.features.row(idx[end]))) ++end;
    // stable sort keeps the group in ascending raw order
    for (std::size_t m = k; m < end; ++m) group_of[idx[m]] = idx[k];
    k = end;
  }

  MergeResult result;
  Dataset& out = result.data;
  out.mode = raw.mode;
  out.class_names = raw.class_names;
  result.row_map.assign(n, 0);

  std::map<std::size_t, std::size_t> merged_row;  // representative -> output row
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t rep = group_of[r];
    auto [it, inserted] = merged_row.try_emplace(rep, out.size());
    if (inserted) {
      out.append(raw.features.row(r), raw.pop[r]);
      members.emplace_back();
    } else {
      out.pop[it->second] += raw.pop[r];
    }
    result.row_map[r] = it->second;
    members[it->second].push_back(r);
  }

  for (std::size_t g = 0; g < out.size(); ++g) {
    const auto& rows = members[g];
    std::vector<std::size_t> labeled;
    for (std::size_t r : rows) {
      if (raw.label[r]) labeled.push_back(r);
    }
    if (labeled.empty()) continue;
    bool conflict = false;
    for (std::size_t r : labeled) conflict |= *raw.label[r] != *raw.label[labeled.front()];

    if (raw.mode == TaskMode::classification) {
      std::map<double, std::size_t> votes;
      for (std::size_t r : labeled) votes[*raw.label[r]] += raw.pop[r];
      double best = votes.begin()->first;
      for (const auto& [k, v] : votes) {
        if (v > votes[best]) best = k;  // map order gives the lowest id on ties
      }
      out.label[g] = best;
    } else {
      double sum = 0.0, weight = 0.0;
      for (std::size_t r : labeled) {
        sum += static_cast<double>(raw.pop[r]) * *raw.label[r];
        weight += static_cast<double>(raw.pop[r]);
      }
      out.label[g] = sum / weight;
    }
    if (conflict) {
      std::ostringstream msg;
      msg << "conflicting labels among identical rows {";
      for (std::size_t k = 0; k < rows.size(); ++k) msg << (k ? "," : "") << rows[k];
      msg << "}; kept " << *out.label[g];
      result.warnings.push_back(msg.str());
    }
  }
  return result;
}

Dataset fold_time_series(std::span<const double> series, std::size_t lag) {
  if (lag == 0) throw ValidationError("lag must be positive");
  if (series.size() <= lag) {
    throw ValidationError("series of length " + std::to_string(series.size()) +
                          " is too short for lag " + std::to_string(lag));
  }
  Dataset data;
  data.mode = TaskMode::regression;
  for (std::size_t t = 0; t + lag < series.size(); ++t) {
    data.append(series.subspan(t, lag), 1, series[t + lag]);
  }
  return data;
}

}  // namespace lapoleaf
