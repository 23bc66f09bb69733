#include "fringemag/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "fringemag/errors.hpp"

namespace fringemag {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(std::string_view cell, int line, std::size_t column) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    throw DataError("line " + std::to_string(line) + ", column " + std::to_string(column + 1) +
                    ": '" + std::string(cell) + "' is not a number");
  }
  return value;
}

std::string format_number(double value) {
  char buffer[32];
  const int n = std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return std::string(buffer, static_cast<std::size_t>(n));
}

void write_atomically(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

const std::vector<double>& column(const Table& table, std::string_view name,
                                  std::string_view what) {
  const auto j = table.find(name);
  if (!j) throw DataError(std::string(what) + " is missing the '" + std::string(name) + "' column");
  return table.columns[*j];
}

}  // namespace

std::optional<std::size_t> Table::find(std::string_view prefix) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j].compare(0, prefix.size(), prefix) == 0) return j;
  }
  return std::nullopt;
}

Table parse_table(std::string_view text) {
  Table table;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '#') {
      const std::string_view body = trim(line.substr(1));
      const auto colon = body.find(':');
      if (colon != std::string_view::npos) {
        table.metadata[std::string(trim(body.substr(0, colon)))] =
            std::string(trim(body.substr(colon + 1)));
      }
      continue;
    }
    const auto cells = split(line);
    if (table.header.empty()) {
      for (const auto cell : cells) table.header.emplace_back(cell);
      table.columns.resize(cells.size());
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(table.header.size()) + " cells, found " +
                      std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      table.columns[j].push_back(parse_cell(cells[j], line_no, j));
    }
  }
  if (table.header.empty()) throw DataError("CSV input is empty");
  return table;
}

Table read_table(const std::filesystem::path& path) {
  try {
    return parse_table(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string format_table(const Table& table) {
  std::string out;
  for (const auto& [key, value] : table.metadata) out += "# " + key + ": " + value + "\n";
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    out += (j ? "," : "") + table.header[j];
  }
  out += '\n';
  for (std::size_t i = 0; i < table.rows(); ++i) {
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
      if (j) out += ',';
      out += format_number(table.columns[j][i]);
    }
    out += '\n';
  }
  return out;
}

void write_table(const std::filesystem::path& path, const Table& table) {
  for (const auto& c : table.columns) {
    if (c.size() != table.rows()) throw DataError("table columns have different lengths");
  }
  write_atomically(path, format_table(table));
}

Dataset dataset_from_table(const Table& table) {
  if (table.header.size() < 2) throw DataError("dataset needs an abscissa and a visibility column");
  Dataset data;
  data.abscissa_label = table.header.front();
  data.abscissa = table.columns.front();
  data.visibility = column(table, "visibility", "dataset");
  if (const auto j = table.find("sigma")) {
    data.sigma = table.columns[*j];
  } else {
    data.sigma.assign(data.abscissa.size(), 1.0);
    data.sigma_defaulted = true;
  }
  data.metadata = table.metadata;
  data.validate();
  return data;
}

Dataset read_dataset(const std::filesystem::path& path) {
  const Table table = read_table(path);
  try {
    return dataset_from_table(table);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

Table curve_table(const VisibilityCurve& curve, std::optional<double> v0) {
  Table t;
  t.header = {curve.abscissa_label, "v_over_v0", "c_permanent_T_m", "c_induced_T2_m"};
  t.columns = {curve.abscissa, curve.v_over_v0, curve.c_permanent, curve.c_induced};
  if (v0) {
    t.header.emplace_back("visibility");
    std::vector<double> absolute = curve.v_over_v0;
    for (auto& v : absolute) v *= *v0;
    t.columns.push_back(std::move(absolute));
    t.metadata["v0"] = format_number(*v0);
  }
  if (!curve.model.empty()) t.metadata["model"] = curve.model;
  return t;
}

void write_curve(const std::filesystem::path& path, const VisibilityCurve& curve,
                 std::optional<double> v0) {
  write_table(path, curve_table(curve, v0));
}

VisibilityCurve read_curve(const std::filesystem::path& path) {
  const Table t = read_table(path);
  VisibilityCurve curve;
  curve.abscissa_label = t.header.front();
  curve.abscissa = t.columns.front();
  curve.v_over_v0 = column(t, "v_over_v0", path.string());
  curve.c_permanent = column(t, "c_permanent", path.string());
  curve.c_induced = column(t, "c_induced", path.string());
  if (const auto it = t.metadata.find("model"); it != t.metadata.end()) curve.model = it->second;
  return curve;
}

void write_profile(const std::filesystem::path& path, const std::vector<ProfileSample>& profile) {
  Table t;
  t.header = {"s_m", "Bx_T", "By_T", "Bz_T", "dBdx_T_per_m", "b_grad_bx_T2_per_m"};
  t.columns.resize(t.header.size());
  for (const auto& p : profile) {
    t.columns[0].push_back(p.s);
    t.columns[1].push_back(p.B.x());
    t.columns[2].push_back(p.B.y());
    t.columns[3].push_back(p.B.z());
    t.columns[4].push_back(p.dbdx);
    t.columns[5].push_back(p.b_grad_bx);
  }
  write_table(path, t);
}

FringeScan read_fringe_scan(const std::filesystem::path& path) {
  const Table t = read_table(path);
  FringeScan scan;
  scan.positions = column(t, "position", path.string());
  scan.counts = column(t, "counts", path.string());
  if (scan.positions.empty()) throw DataError(path.string() + ": fringe scan has no rows");
  return scan;
}

void write_residuals(const std::filesystem::path& path, const Dataset& data, const FitResult& fit) {
  Table t;
  t.header = {data.abscissa_label, "visibility", "sigma", "model", "residual"};
  t.columns = {data.abscissa, data.visibility, data.sigma, fit.model, fit.residuals};
  t.metadata["chi2"] = format_number(fit.chi2);
  t.metadata["reduced_chi2"] = format_number(fit.reduced_chi2);
  write_table(path, t);
}

}  // namespace fringemag
