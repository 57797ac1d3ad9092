#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "sls2/classifier.hpp"
#include "sls2/matrix_set.hpp"
#include "sls2/spectral.hpp"
#include "sls2/trajectory.hpp"

namespace sls2 {

// Parsed problem: the matrix set plus every knob the CLI accepts, and the raw
// JSON document for bit-exact echoing into reports.
struct InputDocument {
    MatrixSet set;
    ClassifyOptions options;
    nlohmann::json raw;
};

// Schema: {"matrices": [matrix...], "options": {...}} where a matrix is two
// rows of two [re, im] pairs. Unknown option keys are rejected so typos fail
// loudly. Throws ParseError with the offending field path.
InputDocument parse_input(const std::string& text, const std::string& path_label);
InputDocument load_input(std::istream& in, const std::string& path_label);
InputDocument load_input_file(const std::string& path);

nlohmann::json to_json(const Mat2& a);
nlohmann::json to_json(const Vec2& v);
nlohmann::json verdict_to_json(const Verdict& v);

// Full classification report: schema version, input echo, and the verdict.
nlohmann::json classify_report(const InputDocument& input, const Verdict& verdict);

// Columns n, b_n, b_n/rho^n, b_n/(n rho^n), written with 17 significant digits
// after a "# rho_hat=..." header line.
void write_rates_csv(std::ostream& os, const RateSequence& rates, double rho_hat);

// Columns n, |v_n|, |v_n|/n for n >= 1, with the construction's checkpoint
// steps listed in a leading comment.
void write_escape_csv(std::ostream& os, const Trajectory& traj);

} // namespace sls2
