#include "kpzc/grammar.hpp"

#include <cctype>
#include <charconv>
#include <stdexcept>

namespace kpzc {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = parse_value();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument(what + " at offset " + std::to_string(pos_) + " in '" +
                                std::string(text_) + "'");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }

  bool at_ident_start() const {
    return pos_ < text_.size() &&
           (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_');
  }

  std::string ident() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_' || text_[pos_] == '-')) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  Expr parse_value() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    Expr e;
    if (consume('[')) {
      e.kind = Expr::Kind::list;
      if (!consume(']')) {
        do {
          e.items.push_back(parse_value());
        } while (consume(','));
        expect(']');
      }
      return e;
    }
    if (at_ident_start()) {
      e.name = ident();
      if (consume('(')) {
        e.kind = Expr::Kind::call;
        if (!consume(')')) {
          do {
            e.args.push_back(parse_arg());
          } while (consume(','));
          expect(')');
        }
      } else {
        e.kind = Expr::Kind::ident;
      }
      return e;
    }
    e.kind = Expr::Kind::number;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, e.number);
    if (ec != std::errc()) fail("expected a number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return e;
  }

  Arg parse_arg() {
    skip_space();
    const std::size_t save = pos_;
    if (at_ident_start()) {
      std::string key = ident();
      if (consume('=')) {
        Arg a;
        a.key = std::move(key);
        a.value.push_back(parse_value());
        return a;
      }
      pos_ = save;
    }
    Arg a;
    a.value.push_back(parse_value());
    return a;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

const Expr& Expr::arg(std::string_view key) const {
  for (const auto& a : args) {
    if (a.key == key) return a.value.front();
  }
  throw std::invalid_argument("missing argument '" + std::string(key) + "' in " + name + "(...)");
}

bool Expr::has_arg(std::string_view key) const {
  for (const auto& a : args) {
    if (a.key == key) return true;
  }
  return false;
}

double Expr::as_number() const {
  if (kind != Kind::number) throw std::invalid_argument("expected a number");
  return number;
}

Expr parse_expr(std::string_view text) { return Parser(text).parse_all(); }

CallExpr parse_call(std::string_view text) {
  Expr e = parse_expr(text);
  if (e.kind != Expr::Kind::call && e.kind != Expr::Kind::ident) {
    throw std::invalid_argument("expected a name or call expression: '" + std::string(text) + "'");
  }
  CallExpr c;
  c.name = e.name;
  c.expr = std::move(e);
  return c;
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("format_number failed");
  return std::string(buf, ptr);
}

}  // namespace kpzc
