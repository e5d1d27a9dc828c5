#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mlexist/linspan.hpp"
#include "mlexist/statespace.hpp"

namespace mlexist::cli {

using nlohmann::json;

/// Whole file as text; InvalidArgument if it cannot be read.
std::string read_text(const std::filesystem::path& path);

json parse_json(const std::string& text, const std::string& what);

/// {"labels": [...], "weights": [...]}; weights default to 1. Numeric
/// labels are kept in their JSON spelling.
StateSpace parse_space(const json& doc);

/// {"rows": [[...K reals...], ...]} as a generator matrix.
Eigen::MatrixXd parse_basis(const json& doc, std::size_t state_count);

/// A JSON integer array of state indices, a JSON string array of labels, or
/// newline-delimited labels.
Sample parse_sample(const std::string& text, const StateSpace& space);

/// Edge parameters: a number (every edge) or an array of C(N,2) numbers.
std::vector<double> parse_edge_params(const json& doc, std::size_t nodes);

/// Rounds to 12 significant digits; non-finite values become null.
json number(double v);
json numbers(const Eigen::VectorXd& v);
json labels_of(const StateSpace& space, const IndexSet& states);

/// Coefficients on the kept rows, spread back to generator positions.
Eigen::VectorXd on_generators(const LinearSpan& span, const Eigen::VectorXd& coefficients,
                              Eigen::Index generator_count);

/// 12-significant-digit text for CSV cells; empty for non-finite values.
std::string format_number(double v);

}  // namespace mlexist::cli
