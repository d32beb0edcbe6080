// Recursive-descent parser for polynomial text.

#include <cctype>
#include <cstdlib>
#include <string>

#include "qlevy/error.hpp"
#include "qlevy/ncpoly.hpp"

namespace qlevy {
namespace {

class Parser {
 public:
  Parser(std::string_view s, const AlgebraSpec& alg) : s_(s), alg_(alg) {}

  NcPoly run() {
    NcPoly out;
    skip();
    cplx sign = 1.0;
    if (peek() == '+' || peek() == '-') {
      sign = get() == '-' ? -1.0 : 1.0;
      skip();
    }
    add_term(out, sign);
    skip();
    while (!eof()) {
      char c = peek();
      if (c != '+' && c != '-') fail("expected '+' or '-'");
      get();
      skip();
      add_term(out, c == '-' ? -1.0 : 1.0);
      skip();
    }
    return alg_.normal_form(out);
  }

 private:
  bool eof() const { return i_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[i_]; }
  char get() { return s_[i_++]; }
  void skip() {
    while (!eof() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, i_); }
  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const {
    throw ParseError(what, at);
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }
  static bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

  double real() {
    const std::size_t start = i_;
    while (digit(peek())) ++i_;
    if (peek() == '.') {
      ++i_;
      while (digit(peek())) ++i_;
    }
    if (i_ == start || (i_ == start + 1 && s_[start] == '.')) fail_at("expected a number", start);
    if (peek() == 'e' || peek() == 'E') {
      std::size_t save = i_;
      ++i_;
      if (peek() == '+' || peek() == '-') ++i_;
      if (!digit(peek())) {
        i_ = save;
      } else {
        while (digit(peek())) ++i_;
      }
    }
    return std::strtod(std::string(s_.substr(start, i_ - start)).c_str(), nullptr);
  }

  cplx scalar() {
    if (peek() != '(') return real();
    get();
    skip();
    double sre = 1.0;
    if (peek() == '-' || peek() == '+') {
      sre = get() == '-' ? -1.0 : 1.0;
      skip();
    }
    const double re = sre * real();
    skip();
    if (peek() != '+' && peek() != '-') fail("expected '+' or '-' in complex scalar");
    const double sim = get() == '-' ? -1.0 : 1.0;
    skip();
    const double im = sim * real();
    if (peek() != 'i') fail("expected 'i'");
    get();
    skip();
    if (peek() != ')') fail("expected ')'");
    get();
    return {re, im};
  }

  void add_term(NcPoly& out, cplx sign) {
    cplx coef = sign;
    bool any = false;
    if (digit(peek()) || peek() == '.' || peek() == '(') {
      coef *= scalar();
      any = true;
      skip();
    }
    Word w;
    while (ident_start(peek())) {
      const std::size_t start = i_;
      while (ident_char(peek())) ++i_;
      Letter l = alg_.letter(s_.substr(start, i_ - start));
      skip();
      cplx scale = 1.0;
      std::size_t power = 1;
      if (peek() == '^') {
        const std::size_t caret = i_;
        get();
        if (peek() == '*') {
          get();
          scale = alg_.generator(l).adjointScale;
          l = alg_.generator(l).adjoint;
          skip();
          if (peek() == '^') {
            const std::size_t caret2 = i_;
            get();
            if (!digit(peek())) fail_at("expected exponent after '^'", caret2);
            power = exponent();
          }
        } else if (digit(peek())) {
          power = exponent();
        } else {
          fail_at("expected '*' or exponent after '^'", caret);
        }
        skip();
      }
      for (std::size_t k = 0; k < power; ++k) {
        w.push_back(l);
        coef *= scale;
      }
      any = true;
    }
    if (!any) fail("expected a term");
    out.add(w, coef);
  }

  std::size_t exponent() {
    std::size_t v = 0;
    while (digit(peek())) {
      v = v * 10 + static_cast<std::size_t>(get() - '0');
      if (v > 4096) fail("exponent too large");
    }
    return v;
  }

  std::string_view s_;
  const AlgebraSpec& alg_;
  std::size_t i_ = 0;
};

}  // namespace

NcPoly parse_poly(std::string_view text, const AlgebraSpec& alg) { return Parser(text, alg).run(); }

}  // namespace qlevy
