#include "xover/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <utility>
#include <vector>

#include "xover/errors.hpp"

namespace xover::io {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN";
}

[[noreturn]] void fail(const std::string& source, std::size_t line,
                       const std::string& what) {
  throw ParseError(source + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& cell, const std::string& source,
                    std::size_t line, const std::string& column) {
  double v = 0.0;
  const char* b = cell.data();
  const char* e = b + cell.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e)
    fail(source, line, "column '" + column + "': expected a number, got '" +
                           cell + "'");
  return v;
}

int parse_binary(const std::string& cell, const std::string& source,
                 std::size_t line, const std::string& column) {
  if (cell == "0") return 0;
  if (cell == "1") return 1;
  fail(source, line,
       "column '" + column + "': expected 0 or 1, got '" + cell + "'");
}

// Most frequent observed value; ties resolved toward the smallest value so
// imputation is deterministic.
double column_mode(std::vector<double> observed) {
  std::sort(observed.begin(), observed.end());
  double best = observed.front();
  std::size_t best_count = 0;
  std::size_t i = 0;
  while (i < observed.size()) {
    std::size_t j = i;
    while (j < observed.size() && observed[j] == observed[i]) ++j;
    if (j - i > best_count) {
      best_count = j - i;
      best = observed[i];
    }
    i = j;
  }
  return best;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

CsvTable read_table(std::istream& in, const std::string& source) {
  CsvTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv(line);
    if (t.header.empty()) {
      t.header = cells;
    } else {
      if (cells.size() != t.header.size())
        fail(source, line_no,
             "expected " + std::to_string(t.header.size()) + " fields, got " +
                 std::to_string(cells.size()));
      t.rows.push_back(std::move(cells));
      t.line_numbers.push_back(line_no);
    }
  }
  if (t.header.empty()) throw ParseError(source + ": empty file");
  return t;
}

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

TrialDataset read_trial_csv(std::istream& in, double pi1, bool impute_missing,
                            const std::string& source_name) {
  CsvTable t = read_table(in, source_name);

  std::size_t arm_col = kNone, y1_col = kNone, y2_col = kNone, id_col = kNone;
  std::vector<std::size_t> x_cols;
  std::vector<std::string> x_names;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    const std::string& h = t.header[c];
    if (h == "arm")
      arm_col = c;
    else if (h == "y1")
      y1_col = c;
    else if (h == "y2")
      y2_col = c;
    else if (h == "id")
      id_col = c;
    else if (h.rfind("x_", 0) == 0) {
      x_cols.push_back(c);
      x_names.push_back(h);
    } else {
      throw ParseError(source_name + ": unrecognized column '" + h + "'");
    }
  }
  (void)id_col;
  const std::pair<std::size_t, const char*> required[] = {
      {arm_col, "arm"}, {y1_col, "y1"}, {y2_col, "y2"}};
  for (auto [col, name] : required)
    if (col == kNone)
      throw ParseError(source_name + ": required column '" +
                       std::string(name) + "' not found");

  if (t.rows.size() < 4)
    throw ParseError(source_name + ": need at least 4 data rows, got " +
                     std::to_string(t.rows.size()));

  const std::size_t n = t.rows.size();
  const std::size_t d = x_cols.size();
  TrialDataset ds;
  ds.pi1 = pi1;
  ds.arm.resize(n);
  ds.y1.resize(n);
  ds.y2.resize(n);
  ds.covariates = Matrix(n, d);
  ds.covariate_names = x_names;

  std::vector<std::vector<std::size_t>> missing_rows(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = t.rows[i];
    std::size_t ln = t.line_numbers[i];
    ds.arm[i] = parse_binary(row[arm_col], source_name, ln, "arm");
    if (is_missing(row[y1_col]) || is_missing(row[y2_col]))
      fail(source_name, ln, "outcome cells may not be missing");
    ds.y1[i] = parse_double(row[y1_col], source_name, ln, "y1");
    ds.y2[i] = parse_double(row[y2_col], source_name, ln, "y2");
    for (std::size_t j = 0; j < d; ++j) {
      const std::string& cell = row[x_cols[j]];
      if (is_missing(cell)) {
        if (!impute_missing)
          fail(source_name, ln,
               "missing value in column '" + x_names[j] +
                   "' (enable imputation to fill with the column mode)");
        missing_rows[j].push_back(i);
        ds.covariates(i, j) = std::numeric_limits<double>::quiet_NaN();
      } else {
        ds.covariates(i, j) = parse_double(cell, source_name, ln, x_names[j]);
      }
    }
  }

  for (std::size_t j = 0; j < d; ++j) {
    if (missing_rows[j].empty()) continue;
    std::vector<double> observed;
    for (std::size_t i = 0; i < n; ++i)
      if (!std::isnan(ds.covariates(i, j)))
        observed.push_back(ds.covariates(i, j));
    if (observed.empty())
      throw ParseError(source_name + ": column '" + x_names[j] +
                       "' has no observed values to impute from");
    double mode = column_mode(std::move(observed));
    for (std::size_t i : missing_rows[j]) ds.covariates(i, j) = mode;
  }

  ds.validate();
  return ds;
}

TrialDataset read_trial_csv_file(const std::string& path, double pi1,
                                 bool impute_missing) {
  std::ifstream f(path);
  if (!f) throw ParseError(path + ": cannot open file");
  return read_trial_csv(f, pi1, impute_missing, path);
}

void write_trial_csv(std::ostream& out, const TrialDataset& data) {
  out << "arm,y1,y2";
  for (const auto& name : data.covariate_names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < data.n(); ++i) {
    out << data.arm[i] << ',' << format_double(data.y1[i]) << ','
        << format_double(data.y2[i]);
    for (std::size_t j = 0; j < data.covariates.cols(); ++j)
      out << ',' << format_double(data.covariates(i, j));
    out << '\n';
  }
}

void write_trial_csv_file(const std::string& path, const TrialDataset& data) {
  std::ofstream f(path);
  if (!f) throw ParseError(path + ": cannot open file for writing");
  write_trial_csv(f, data);
}

CohortData read_cohort_csv(std::istream& in, bool impute_missing,
                           const std::string& source_name) {
  CsvTable t = read_table(in, source_name);

  std::size_t y0_col = kNone;
  std::vector<std::size_t> x_cols;
  std::vector<std::string> x_names;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    const std::string& h = t.header[c];
    if (h == "y0")
      y0_col = c;
    else if (h.rfind("x_", 0) == 0) {
      x_cols.push_back(c);
      x_names.push_back(h);
    } else {
      throw ParseError(source_name + ": unrecognized column '" + h + "'");
    }
  }
  if (y0_col == kNone)
    throw ParseError(source_name + ": required column 'y0' not found");
  if (t.rows.empty()) throw ParseError(source_name + ": cohort is empty");

  const std::size_t n = t.rows.size();
  const std::size_t d = x_cols.size();
  CohortData cohort;
  cohort.y0.resize(n);
  cohort.covariates = Matrix(n, d);
  cohort.covariate_names = x_names;

  std::vector<std::vector<std::size_t>> missing_rows(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = t.rows[i];
    std::size_t ln = t.line_numbers[i];
    cohort.y0[i] = parse_binary(row[y0_col], source_name, ln, "y0");
    for (std::size_t j = 0; j < d; ++j) {
      const std::string& cell = row[x_cols[j]];
      if (is_missing(cell)) {
        missing_rows[j].push_back(i);
        cohort.covariates(i, j) = std::numeric_limits<double>::quiet_NaN();
      } else {
        cohort.covariates(i, j) =
            parse_double(cell, source_name, ln, x_names[j]);
      }
    }
  }

  for (std::size_t j = 0; j < d; ++j) {
    if (missing_rows[j].empty()) continue;
    bool binary = true;
    for (std::size_t i = 0; i < n; ++i) {
      double v = cohort.covariates(i, j);
      if (!std::isnan(v) && v != 0.0 && v != 1.0) binary = false;
    }
    if (!impute_missing || !binary)
      throw ParseError(
          source_name + ": column '" + x_names[j] + "' has missing values" +
          (binary ? " (enable imputation to treat them as the negative "
                    "category)"
                  : " and is not binary, so they cannot be imputed"));
    for (std::size_t i : missing_rows[j]) cohort.covariates(i, j) = 0.0;
  }

  return cohort;
}

CohortData read_cohort_csv_file(const std::string& path, bool impute_missing) {
  std::ifstream f(path);
  if (!f) throw ParseError(path + ": cannot open file");
  return read_cohort_csv(f, impute_missing, path);
}

void write_cohort_csv(std::ostream& out, const CohortData& cohort) {
  out << "y0";
  for (const auto& name : cohort.covariate_names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < cohort.n(); ++i) {
    out << cohort.y0[i];
    for (std::size_t j = 0; j < cohort.covariates.cols(); ++j)
      out << ',' << format_double(cohort.covariates(i, j));
    out << '\n';
  }
}

void write_cohort_csv_file(const std::string& path, const CohortData& cohort) {
  std::ofstream f(path);
  if (!f) throw ParseError(path + ": cannot open file for writing");
  write_cohort_csv(f, cohort);
}

}  // namespace xover::io
