#pragma once

#include <iosfwd>
#include <string>

#include "xover/simulation.hpp"
#include "xover/trial_data.hpp"

namespace xover::io {

// Shortest decimal form that parses back to exactly the same double; used
// for all floating-point CSV output so files are reproducible and lossless.
std::string format_double(double v);

// Trial CSV: header row with columns `arm`, `y1`, `y2` (any order), an
// optional `id` column (carried through but otherwise ignored) and zero or
// more covariate columns named `x_<name>`.  Values are plain decimals; empty
// or NA covariate cells are either mode-imputed (impute_missing) or
// rejected.  Outcome and arm cells must always be present; at least four
// data rows are required.  Parse failures throw ParseError naming
// `source_name` and the line.
TrialDataset read_trial_csv(std::istream& in, double pi1, bool impute_missing,
                            const std::string& source_name = "<stream>");
TrialDataset read_trial_csv_file(const std::string& path, double pi1,
                                 bool impute_missing);
void write_trial_csv(std::ostream& out, const TrialDataset& data);
void write_trial_csv_file(const std::string& path, const TrialDataset& data);

// Cohort CSV: column `y0` (binary) plus `x_<name>` covariates.  With
// impute_missing, empty cells in binary covariate columns become 0 (the
// negative category); anything else missing is an error.
CohortData read_cohort_csv(std::istream& in, bool impute_missing,
                           const std::string& source_name = "<stream>");
CohortData read_cohort_csv_file(const std::string& path, bool impute_missing);
void write_cohort_csv(std::ostream& out, const CohortData& cohort);
void write_cohort_csv_file(const std::string& path, const CohortData& cohort);

}  // namespace xover::io
