#include "cli_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mlexist/error.hpp"
#include "mlexist/families.hpp"

namespace mlexist::cli {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, what + " is not valid JSON: " + e.what());
  }
}

namespace {

double real(const json& v, const std::string& what) {
  if (!v.is_number()) throw Error(ErrorCode::InvalidArgument, what + " must be a number");
  return v.get<double>();
}

}  // namespace

StateSpace parse_space(const json& doc) {
  if (!doc.is_object() || !doc.contains("labels") || !doc["labels"].is_array()) {
    throw Error(ErrorCode::InvalidArgument, "space JSON needs a \"labels\" array");
  }
  std::vector<std::string> labels;
  for (const json& l : doc["labels"]) {
    if (l.is_string()) labels.push_back(l.get<std::string>());
    else if (l.is_number()) labels.push_back(l.dump());
    else throw Error(ErrorCode::InvalidArgument, "labels must be strings or numbers");
  }
  std::vector<double> weights(labels.size(), 1.0);
  if (doc.contains("weights")) {
    const json& w = doc["weights"];
    if (!w.is_array()) throw Error(ErrorCode::InvalidArgument, "\"weights\" must be an array");
    weights.clear();
    for (const json& x : w) weights.push_back(real(x, "weight"));
  }
  return StateSpace(std::move(labels), std::move(weights));
}

Eigen::MatrixXd parse_basis(const json& doc, std::size_t state_count) {
  if (!doc.is_object() || !doc.contains("rows") || !doc["rows"].is_array()) {
    throw Error(ErrorCode::InvalidArgument, "basis JSON needs a \"rows\" array");
  }
  const json& rows = doc["rows"];
  if (rows.empty()) throw Error(ErrorCode::EmptySpace, "basis has no rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(state_count));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array() || rows[r].size() != state_count) {
      throw Error(ErrorCode::DimensionMismatch,
                  "basis row " + std::to_string(r) + " must have " +
                      std::to_string(state_count) + " entries");
    }
    for (std::size_t x = 0; x < state_count; ++x) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(x)) =
          real(rows[r][x], "basis entry");
    }
  }
  return m;
}

Sample parse_sample(const std::string& text, const StateSpace& space) {
  const json doc = json::parse(text, nullptr, false);
  std::vector<std::size_t> indices;
  if (!doc.is_discarded() && doc.is_array()) {
    for (const json& v : doc) {
      if (v.is_number_integer()) {
        const auto i = v.get<long long>();
        if (i < 0 || static_cast<std::size_t>(i) >= space.size()) {
          throw Error(ErrorCode::IndexOutOfRange,
                      "sample index " + std::to_string(i) + " outside 0.." +
                          std::to_string(space.size() - 1));
        }
        indices.push_back(static_cast<std::size_t>(i));
      } else if (v.is_string()) {
        indices.push_back(space.index_of(v.get<std::string>()));
      } else {
        throw Error(ErrorCode::InvalidArgument,
                    "sample entries must be integer indices or string labels");
      }
    }
  } else {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      const auto last = line.find_last_not_of(" \t\r");
      indices.push_back(space.index_of(line.substr(first, last - first + 1)));
    }
  }
  return Sample(space, std::move(indices));
}

std::vector<double> parse_edge_params(const json& doc, std::size_t nodes) {
  const std::size_t edges = edge_count(nodes);
  const json& c = doc.is_object() && doc.contains("c") ? doc["c"] : doc;
  if (c.is_number()) return std::vector<double>(edges, c.get<double>());
  if (!c.is_array()) throw Error(ErrorCode::InvalidArgument, "edge parameters must be an array");
  if (c.size() != edges) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(edges) + " edge parameters, got " +
                    std::to_string(c.size()));
  }
  std::vector<double> out;
  for (const json& v : c) out.push_back(real(v, "edge parameter"));
  return out;
}

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  const double rounded = std::strtod(buf, nullptr);
  return rounded == 0.0 ? 0.0 : rounded;  // no "-0.0"
}

json numbers(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

json labels_of(const StateSpace& space, const IndexSet& states) {
  json out = json::array();
  for (std::size_t x : states) out.push_back(space.label(x));
  return out;
}

Eigen::VectorXd on_generators(const LinearSpan& span, const Eigen::VectorXd& coefficients,
                              Eigen::Index generator_count) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(generator_count);
  const auto& kept = span.kept_generators();
  for (std::size_t j = 0; j < kept.size(); ++j) {
    out(kept[j]) = coefficients(static_cast<Eigen::Index>(j));
  }
  return out;
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace mlexist::cli
