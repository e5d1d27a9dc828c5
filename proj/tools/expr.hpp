#pragma once

#include <map>
#include <string>
#include <string_view>

namespace mlexist::cli {

/// Evaluates arithmetic such as "m*log2(k)" or "ceil(K*log(K))".
/// Operators + - * / ^ and parentheses; functions log (natural), log2, exp,
/// sqrt, ceil, floor. Throws Error(InvalidArgument) on malformed input or an
/// unknown name.
double evaluate_expression(std::string_view text,
                           const std::map<std::string, double>& variables);

}  // namespace mlexist::cli
