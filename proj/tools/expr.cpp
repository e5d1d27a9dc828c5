#include "expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "mlexist/error.hpp"

namespace mlexist::cli {

namespace {

class Parser {
 public:
  Parser(std::string_view text, const std::map<std::string, double>& vars)
      : text_(text), vars_(vars) {}

  double parse() {
    const double v = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::InvalidArgument,
                "bad expression \"" + std::string(text_) + "\": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double expression() {
    double v = term();
    for (;;) {
      if (accept('+')) v += term();
      else if (accept('-')) v -= term();
      else return v;
    }
  }

  double term() {
    double v = unary();
    for (;;) {
      if (accept('*')) v *= unary();
      else if (accept('/')) v /= unary();
      else return v;
    }
  }

  double unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  double power() {
    const double base = primary();
    if (accept('^')) return std::pow(base, unary());
    return base;
  }

  double primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end");
    const char c = text_[pos_];
    if (accept('(')) {
      const double v = expression();
      if (!accept(')')) fail("missing ')'");
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::string rest(text_.substr(pos_));
      char* end = nullptr;
      const double v = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) fail("bad number");
      pos_ += static_cast<std::size_t>(end - rest.c_str());
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name(text_.substr(start, pos_ - start));
      if (accept('(')) {
        const double arg = expression();
        if (!accept(')')) fail("missing ')' after " + name);
        return call(name, arg);
      }
      const auto it = vars_.find(name);
      if (it == vars_.end()) fail("unknown variable " + name);
      return it->second;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  double call(const std::string& name, double x) const {
    if (name == "log") return std::log(x);
    if (name == "log2") return std::log2(x);
    if (name == "exp") return std::exp(x);
    if (name == "sqrt") return std::sqrt(x);
    if (name == "ceil") return std::ceil(x);
    if (name == "floor") return std::floor(x);
    fail("unknown function " + name);
  }

  std::string_view text_;
  const std::map<std::string, double>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

double evaluate_expression(std::string_view text,
                           const std::map<std::string, double>& variables) {
  const double v = Parser(text, variables).parse();
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument,
                "expression \"" + std::string(text) + "\" is not finite");
  }
  return v;
}

}  // namespace mlexist::cli
