#include "statrcm/data.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string_view>

#include "statrcm/error.hpp"

namespace statrcm::data {

namespace {

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;
};

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
    cells.emplace_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

Csv read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  Csv csv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.empty()) continue;
    if (csv.header.empty()) {
      csv.header = split_line(line);
      continue;
    }
    csv.rows.push_back(split_line(line));
    csv.line_numbers.push_back(line_no);
  }
  if (csv.header.empty()) throw DataError("'" + path.string() + "' is empty");
  if (csv.rows.empty()) throw DataError("'" + path.string() + "' has a header but no data rows");
  return csv;
}

std::string where(const std::filesystem::path& path, int line) {
  return path.string() + ":" + std::to_string(line);
}

double parse_number(const std::string& cell, const std::filesystem::path& path, int line) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value))
    throw DataError(where(path, line) + ": malformed number '" + cell + "'");
  return value;
}

int parse_year(const std::string& cell, const std::filesystem::path& path, int line) {
  int year = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), year);
  if (ec != std::errc() || ptr != cell.data() + cell.size())
    throw DataError(where(path, line) + ": malformed year '" + cell + "'");
  return year;
}

std::size_t column_index(const Csv& csv, std::string_view name, const std::filesystem::path& path) {
  for (std::size_t i = 0; i < csv.header.size(); ++i)
    if (csv.header[i] == name) return i;
  throw DataError("'" + path.string() + "' lacks required column '" + std::string(name) + "'");
}

bool has_column(const Csv& csv, std::string_view name) {
  for (const auto& h : csv.header)
    if (h == name) return true;
  return false;
}

void check_contiguous(const std::vector<int>& years, const std::string& what) {
  for (std::size_t i = 1; i < years.size(); ++i) {
    if (years[i] != years[i - 1] + 1)
      throw DataError(what + ": years are not contiguous (" + std::to_string(years[i - 1]) + " followed by " +
                      std::to_string(years[i]) + ")");
  }
}

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

struct Range {
  double lo;
  double hi;
  const char* unit;
};

// Plausibility ranges for the canonical units; values outside only raise warnings.
constexpr std::array<Range, model::kObsDim> kObservationRanges = {{
    {500.0, 1500.0, "GtC"},
    {-5.0, 10.0, "GtC/yr"},
    {-5.0, 10.0, "GtC/yr"},
    {-1.0, 10.0, "W/m^2"},
    {-2.0, 6.0, "degC"},
    {-2.0, 3.0, "degC"},
    {-200.0, 500.0, "W yr m^-2"},
}};

}  // namespace

int ObservationRow::observed_count() const {
  int n = 0;
  for (double v : values) n += is_missing(v) ? 0 : 1;
  return n;
}

Eigen::MatrixXd ObservationTable::matrix() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), model::kObsDim);
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (int j = 0; j < model::kObsDim; ++j) m(static_cast<Eigen::Index>(t), j) = rows[t].values[static_cast<std::size_t>(j)];
  return m;
}

std::vector<double> ObservationTable::series(int column) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.values.at(static_cast<std::size_t>(column)));
  return out;
}

void ObservationTable::validate() const {
  if (rows.empty()) throw DataError("observation table is empty");
  std::vector<int> years;
  for (const auto& r : rows) {
    if (r.observed_count() == 0) throw DataError("year " + std::to_string(r.year) + " has no observed entries");
    years.push_back(r.year);
  }
  check_contiguous(years, "observations");
}

CovariateTable CovariateTable::slice(int first, int last) const {
  if (rows.empty() || first < first_year() || last > last_year() || first > last)
    throw DataError("covariates do not cover years " + std::to_string(first) + "-" + std::to_string(last));
  CovariateTable out;
  const auto offset = static_cast<std::size_t>(first - first_year());
  out.rows.assign(rows.begin() + static_cast<std::ptrdiff_t>(offset),
                  rows.begin() + static_cast<std::ptrdiff_t>(offset + static_cast<std::size_t>(last - first + 1)));
  return out;
}

void CovariateTable::validate() const {
  if (rows.empty()) throw DataError("covariate table is empty");
  std::vector<int> years;
  for (const auto& r : rows) {
    for (double v : {r.e_ff, r.e_luc, r.f_nonco2, r.f_nat}) {
      if (!std::isfinite(v)) throw DataError("missing covariate value in year " + std::to_string(r.year));
    }
    years.push_back(r.year);
  }
  check_contiguous(years, "covariates");
}

ObservationTable load_observations(const std::filesystem::path& path) {
  const Csv csv = read_csv(path);
  const std::size_t year_col = column_index(csv, "year", path);
  std::array<std::size_t, model::kObsDim> cols{};
  for (int j = 0; j < model::kObsDim; ++j) cols[static_cast<std::size_t>(j)] = column_index(csv, kObservationColumns[static_cast<std::size_t>(j)], path);

  ObservationTable table;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& cells = csv.rows[r];
    const int line = csv.line_numbers[r];
    if (cells.size() != csv.header.size())
      throw DataError(where(path, line) + ": expected " + std::to_string(csv.header.size()) + " fields, found " +
                      std::to_string(cells.size()));
    ObservationRow row;
    row.year = parse_year(cells[year_col], path, line);
    for (int j = 0; j < model::kObsDim; ++j) {
      const std::string& cell = cells[cols[static_cast<std::size_t>(j)]];
      double v = cell.empty() ? kMissing : parse_number(cell, path, line);
      row.values[static_cast<std::size_t>(j)] = v;
      const Range& range = kObservationRanges[static_cast<std::size_t>(j)];
      if (!is_missing(v) && (v < range.lo || v > range.hi)) {
        table.warnings.push_back(where(path, line) + ": " + kObservationColumns[static_cast<std::size_t>(j)] + " = " +
                                 format_number(v) + " outside the plausible range [" + format_number(range.lo) + ", " +
                                 format_number(range.hi) + "] " + range.unit);
      }
    }
    if (row.observed_count() == 0) {
      table.warnings.push_back(where(path, line) + ": year " + std::to_string(row.year) + " has no observations; dropped");
      continue;
    }
    table.rows.push_back(row);
  }
  table.validate();
  return table;
}

namespace {

struct RawCovariates {
  std::vector<int> years;
  std::vector<double> e_ff, e_luc, f_nonco2, f_nat;
};

RawCovariates read_raw_covariates(const std::filesystem::path& path, bool allow_total) {
  const Csv csv = read_csv(path);
  const std::size_t year_col = column_index(csv, "year", path);
  const bool merged = allow_total && has_column(csv, "e_total") && !has_column(csv, "e_ff");
  const std::size_t ff_col = column_index(csv, merged ? "e_total" : "e_ff", path);
  const std::size_t luc_col = merged ? 0 : column_index(csv, "e_luc", path);
  const std::size_t non_col = column_index(csv, "f_nonco2", path);
  const std::size_t nat_col = column_index(csv, "f_nat", path);

  RawCovariates raw;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& cells = csv.rows[r];
    const int line = csv.line_numbers[r];
    if (cells.size() != csv.header.size())
      throw DataError(where(path, line) + ": expected " + std::to_string(csv.header.size()) + " fields, found " +
                      std::to_string(cells.size()));
    auto num = [&](std::size_t col) { return cells[col].empty() ? kMissing : parse_number(cells[col], path, line); };
    raw.years.push_back(parse_year(cells[year_col], path, line));
    raw.e_ff.push_back(num(ff_col));
    raw.e_luc.push_back(merged ? 0.0 : num(luc_col));
    raw.f_nonco2.push_back(num(non_col));
    raw.f_nat.push_back(num(nat_col));
  }
  check_contiguous(raw.years, path.string());
  return raw;
}

void impute_trailing(std::vector<double>& series, int fit_window, const std::string& name, std::vector<std::string>& warnings) {
  std::size_t n_complete = series.size();
  while (n_complete > 0 && is_missing(series[n_complete - 1])) --n_complete;
  if (n_complete == series.size()) return;
  const int horizon = static_cast<int>(series.size() - n_complete);
  const auto fill = impute_linear_trend(std::span<const double>(series.data(), n_complete), fit_window, horizon);
  for (int h = 0; h < horizon; ++h) series[n_complete + static_cast<std::size_t>(h)] = fill[static_cast<std::size_t>(h)];
  warnings.push_back(name + ": imputed " + std::to_string(horizon) + " trailing value(s) by linear trend over the last " +
                     std::to_string(fit_window) + " years");
}

CovariateTable assemble(const RawCovariates& raw) {
  CovariateTable table;
  for (std::size_t i = 0; i < raw.years.size(); ++i)
    table.rows.push_back(model::CovariateRow{raw.years[i], raw.e_ff[i], raw.e_luc[i], raw.f_nonco2[i], raw.f_nat[i]});
  return table;
}

}  // namespace

CovariateTable load_covariates(const std::filesystem::path& path, const CovariateLoadOptions& options) {
  RawCovariates raw = read_raw_covariates(path, false);
  std::vector<std::string> warnings;
  if (options.impute_trailing_forcing) {
    impute_trailing(raw.f_nonco2, options.fit_window, "f_nonco2", warnings);
    impute_trailing(raw.f_nat, options.fit_window, "f_nat", warnings);
  }
  CovariateTable table = assemble(raw);
  table.warnings = std::move(warnings);
  table.validate();
  return table;
}

ScenarioTable load_scenario(const std::filesystem::path& path, const ScenarioLoadOptions& options) {
  RawCovariates raw = read_raw_covariates(path, true);
  std::vector<std::string> warnings;
  if (options.hold_natural_forcing) {
    int filled = 0;
    for (double& v : raw.f_nat) {
      if (is_missing(v)) {
        v = *options.hold_natural_forcing;
        ++filled;
      }
    }
    if (filled > 0)
      warnings.push_back("f_nat: " + std::to_string(filled) + " empty cell(s) held at the last in-sample value " +
                         format_number(*options.hold_natural_forcing));
  }
  ScenarioTable table = assemble(raw);
  table.warnings = std::move(warnings);
  table.validate();
  if (options.expected_first_year && table.first_year() != *options.expected_first_year)
    throw DataError("scenario starts in " + std::to_string(table.first_year()) + " but must start in " +
                    std::to_string(*options.expected_first_year));
  return table;
}

void write_observations(const std::filesystem::path& path, const ObservationTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "year";
  for (const char* name : kObservationColumns) out << ',' << name;
  out << '\n';
  for (const auto& row : table.rows) {
    out << row.year;
    for (double v : row.values) {
      out << ',';
      if (!is_missing(v)) out << format_number(v);
    }
    out << '\n';
  }
}

void write_covariates(const std::filesystem::path& path, const CovariateTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "year,e_ff,e_luc,f_nonco2,f_nat\n";
  for (const auto& r : table.rows) {
    out << r.year << ',' << format_number(r.e_ff) << ',' << format_number(r.e_luc) << ',' << format_number(r.f_nonco2)
        << ',' << format_number(r.f_nat) << '\n';
  }
}

void check_aligned(const ObservationTable& obs, const CovariateTable& cov) {
  if (obs.empty() || cov.empty()) throw DataError("empty observation or covariate table");
  if (obs.size() != cov.size() || obs.first_year() != cov.first_year())
    throw DataError("observations (" + std::to_string(obs.first_year()) + "-" + std::to_string(obs.last_year()) +
                    ") and covariates (" + std::to_string(cov.first_year()) + "-" + std::to_string(cov.last_year()) +
                    ") are not aligned");
}

std::vector<double> impute_linear_trend(std::span<const double> series, int fit_window, int horizon) {
  if (fit_window < 2) throw DataError("trend imputation needs a fit window of at least 2");
  if (horizon < 0) throw DataError("negative imputation horizon");
  if (series.size() < static_cast<std::size_t>(fit_window))
    throw DataError("trend imputation needs " + std::to_string(fit_window) + " trailing values, got " +
                    std::to_string(series.size()));
  const auto tail = series.last(static_cast<std::size_t>(fit_window));
  for (double v : tail)
    if (is_missing(v)) throw DataError("trend imputation window contains a missing value");

  // x = 1..w, centred at (w+1)/2
  const double w = fit_window;
  const double x_bar = (w + 1.0) / 2.0;
  double y_bar = 0.0;
  for (double v : tail) y_bar += v;
  y_bar /= w;
  double sxy = 0.0;
  double sxx = 0.0;
  for (int i = 0; i < fit_window; ++i) {
    const double dx = (i + 1) - x_bar;
    sxy += dx * (tail[static_cast<std::size_t>(i)] - y_bar);
    sxx += dx * dx;
  }
  const double slope = sxy / sxx;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon));
  for (int h = 1; h <= horizon; ++h) out.push_back(y_bar + slope * (w + h - x_bar));
  return out;
}

double convert_ohc_units(double value_zj, const OhcConversion& conv) {
  return value_zj * 1e21 / (conv.earth_area_m2 * conv.seconds_per_year);
}

}  // namespace statrcm::data
