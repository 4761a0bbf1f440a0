#pragma once

// Concrete syntax:
//
//   formula  := iff
//   iff      := implies ( "<->" implies )*          left-associative
//   implies  := or ( "->" implies )?                right-associative
//   or       := and ( "|" and )*
//   and      := unary ( "&" unary )*
//   unary    := "-" unary | ("all" | "exists") var formula | primary
//   primary  := "(" formula ")" | Pred "(" terms ")" | term ("=" | "!=") term
//   term     := var | Const | Func "(" terms ")"
//
// Lowercase-initial identifiers are variables, uppercase-initial identifiers
// are signature symbols. A quantifier body extends as far right as possible.
// An optional trailing "." is accepted.

#include <cctype>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "folgrade/signature.hpp"
#include "folgrade/syntax.hpp"

namespace folgrade {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownSymbol, ArityMismatch, FreeVariable };

  ParseError(Kind kind, std::size_t position, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind), position_(position) {}

  static ParseError syntax(std::size_t position, const std::string& expected, const std::string& found) {
    ParseError e(Kind::Syntax, position,
                 "syntax error at column " + std::to_string(position + 1) + ": expected " + expected + " but found " +
                     found);
    e.expected_ = expected;
    return e;
  }
  static ParseError unknownSymbol(std::size_t position, const std::string& name, const std::string& detail = {}) {
    ParseError e(Kind::UnknownSymbol, position,
                 detail.empty() ? "unknown symbol '" + name + "' at column " + std::to_string(position + 1) +
                                      ": it is not among the symbols allowed for this exercise"
                                : detail);
    e.name_ = name;
    return e;
  }
  static ParseError arityMismatch(std::size_t position, const std::string& name, std::size_t declared,
                                  std::size_t used) {
    ParseError e(Kind::ArityMismatch, position,
                 "'" + name + "' takes " + std::to_string(declared) + " argument" + (declared == 1 ? "" : "s") +
                     " but is used with " + std::to_string(used) + " at column " + std::to_string(position + 1));
    e.name_ = name;
    e.declared_ = declared;
    e.used_ = used;
    return e;
  }
  static ParseError freeVariable(std::size_t position, const std::string& name) {
    ParseError e(Kind::FreeVariable, position,
                 "variable '" + name + "' at column " + std::to_string(position + 1) +
                     " is not bound by any quantifier; answers must be sentences");
    e.name_ = name;
    return e;
  }

  Kind kind() const { return kind_; }
  /// Zero-based byte offset into the input.
  std::size_t position() const { return position_; }
  const std::string& expected() const { return expected_; }
  const std::string& name() const { return name_; }
  std::size_t declaredArity() const { return declared_; }
  std::size_t usedArity() const { return used_; }

 private:
  Kind kind_;
  std::size_t position_;
  std::string expected_;
  std::string name_;
  std::size_t declared_ = 0;
  std::size_t used_ = 0;
};

inline const char* toString(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::Syntax: return "SyntaxError";
    case ParseError::Kind::UnknownSymbol: return "UnknownSymbol";
    case ParseError::Kind::ArityMismatch: return "ArityMismatch";
    case ParseError::Kind::FreeVariable: return "FreeVariable";
  }
  return "?";
}

namespace detail {

struct Token {
  enum class Kind { Identifier, LParen, RParen, Comma, Not, And, Or, Implies, Iff, Equals, NotEquals, All, Exists,
                    Period, End };
  Kind kind;
  std::string text;
  std::size_t position;
};

inline std::string describe(const Token& t) {
  if (t.kind == Token::Kind::End) return "end of input";
  return "'" + t.text + "'";
}

inline std::vector<Token> tokenize(std::string_view text) {
  using K = Token::Kind;
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (c >= 0x80) throw ParseError::syntax(i, "an ASCII symbol", "a non-ASCII character");
    if (std::isalpha(c)) {
      std::size_t start = i;
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
      std::string word(text.substr(start, i - start));
      K kind = word == "all" ? K::All : word == "exists" ? K::Exists : K::Identifier;
      tokens.push_back({kind, std::move(word), start});
      continue;
    }
    auto single = [&](K kind) {
      tokens.push_back({kind, std::string(1, static_cast<char>(c)), i});
      ++i;
    };
    switch (c) {
      case '(': single(K::LParen); break;
      case ')': single(K::RParen); break;
      case ',': single(K::Comma); break;
      case '&': single(K::And); break;
      case '|': single(K::Or); break;
      case '=': single(K::Equals); break;
      case '.': single(K::Period); break;
      case '-':
        if (text.substr(i, 2) == "->") {
          tokens.push_back({K::Implies, "->", i});
          i += 2;
        } else {
          single(K::Not);
        }
        break;
      case '<':
        if (text.substr(i, 3) != "<->") throw ParseError::syntax(i, "'<->'", "'<'");
        tokens.push_back({K::Iff, "<->", i});
        i += 3;
        break;
      case '!':
        if (text.substr(i, 2) != "!=") throw ParseError::syntax(i, "'!='", "'!'");
        tokens.push_back({K::NotEquals, "!=", i});
        i += 2;
        break;
      default:
        throw ParseError::syntax(i, "a formula symbol", "'" + std::string(1, static_cast<char>(c)) + "'");
    }
  }
  tokens.push_back({K::End, "", text.size()});
  return tokens;
}

class Parser {
 public:
  Parser(std::string_view text, Signature* sig, bool inferSymbols)
      : tokens_(tokenize(text)), sig_(sig), infer_(inferSymbols) {}

  Formula parseSentence() {
    Formula f = parseIff();
    if (peek().kind == Token::Kind::Period) ++pos_;
    if (peek().kind != Token::Kind::End) {
      throw ParseError::syntax(peek().position, "a connective or end of input", describe(peek()));
    }
    if (firstFree_) throw ParseError::freeVariable(firstFree_->second, firstFree_->first);
    return f;
  }

 private:
  using K = Token::Kind;

  const Token& peek() const { return tokens_[pos_]; }
  bool accept(K kind) {
    if (peek().kind != kind) return false;
    ++pos_;
    return true;
  }
  const Token& expect(K kind, const char* what) {
    if (peek().kind != kind) throw ParseError::syntax(peek().position, what, describe(peek()));
    return tokens_[pos_++];
  }

  Formula parseIff() {
    Formula f = parseImplies();
    while (accept(K::Iff)) f = Formula::biconditional(std::move(f), parseImplies());
    return f;
  }

  Formula parseImplies() {
    Formula f = parseOr();
    if (accept(K::Implies)) return Formula::implication(std::move(f), parseImplies());
    return f;
  }

  Formula parseOr() {
    Formula f = parseAnd();
    while (accept(K::Or)) f = Formula::disjunction(std::move(f), parseAnd());
    return f;
  }

  Formula parseAnd() {
    Formula f = parseUnary();
    while (accept(K::And)) f = Formula::conjunction(std::move(f), parseUnary());
    return f;
  }

  Formula parseUnary() {
    if (accept(K::Not)) return Formula::negation(parseUnary());
    if (peek().kind == K::All || peek().kind == K::Exists) {
      const bool universal = peek().kind == K::All;
      ++pos_;
      const Token& var = expect(K::Identifier, "a variable name after the quantifier");
      if (!isVariableName(var.text)) {
        throw ParseError::syntax(var.position, "a variable name (starting with a lowercase letter)",
                                 "'" + var.text + "'");
      }
      checkReserved(var);
      bound_.push_back(var.text);
      Formula body = parseIff();
      bound_.pop_back();
      return universal ? Formula::forAll(var.text, std::move(body)) : Formula::exists(var.text, std::move(body));
    }
    return parsePrimary();
  }

  Formula parsePrimary() {
    if (accept(K::LParen)) {
      Formula f = parseIff();
      expect(K::RParen, "')'");
      return f;
    }
    if (peek().kind != K::Identifier) {
      throw ParseError::syntax(peek().position, "an atomic formula, '(', '-' or a quantifier", describe(peek()));
    }
    const Token& head = tokens_[pos_++];
    checkReserved(head);
    if (isVariableName(head.text)) {
      Term left = variableTerm(head);
      return finishEquality(std::move(left), head);
    }
    std::vector<Term> args;
    bool applied = false;
    if (accept(K::LParen)) {
      applied = true;
      args = parseArguments();
    }
    if (peek().kind == K::Equals || peek().kind == K::NotEquals) {
      Term left = symbolTerm(head, std::move(args), applied);
      return finishEquality(std::move(left), head);
    }
    checkPredicate(head, args.size(), applied);
    return Formula::atom(head.text, std::move(args));
  }

  Formula finishEquality(Term left, const Token& head) {
    if (accept(K::Equals)) return Formula::equality(std::move(left), parseTerm());
    if (accept(K::NotEquals)) return Formula::negation(Formula::equality(std::move(left), parseTerm()));
    throw ParseError::syntax(peek().position, "'=' or '!=' after the term '" + head.text + "'", describe(peek()));
  }

  std::vector<Term> parseArguments() {
    std::vector<Term> args;
    args.push_back(parseTerm());
    while (accept(K::Comma)) args.push_back(parseTerm());
    expect(K::RParen, "',' or ')'");
    return args;
  }

  Term parseTerm() {
    if (peek().kind != K::Identifier) throw ParseError::syntax(peek().position, "a term", describe(peek()));
    const Token& head = tokens_[pos_++];
    checkReserved(head);
    if (isVariableName(head.text)) return variableTerm(head);
    std::vector<Term> args;
    bool applied = false;
    if (accept(K::LParen)) {
      applied = true;
      args = parseArguments();
    }
    return symbolTerm(head, std::move(args), applied);
  }

  Term variableTerm(const Token& token) {
    bool isBound = false;
    for (const auto& b : bound_) isBound = isBound || b == token.text;
    if (!isBound && !firstFree_) firstFree_ = std::make_pair(token.text, token.position);
    if (peek().kind == K::LParen) {
      throw ParseError::syntax(peek().position, "a connective, ')' or '='",
                               "'(' (functions and predicates start with an uppercase letter)");
    }
    return Term::variable(token.text);
  }

  void checkReserved(const Token& token) const {
    if (isReservedName(token.text)) {
      throw ParseError::syntax(token.position, "an identifier", "the reserved name '" + token.text + "'");
    }
  }

  Term symbolTerm(const Token& head, std::vector<Term> args, bool applied) {
    const std::size_t used = args.size();
    using C = Signature::SymbolClass;
    C cls = sig_->classify(head.text);
    if (cls == C::Undeclared && infer_) {
      if (applied) {
        sig_->addFunction(head.text, used);
      } else {
        sig_->addConstant(head.text);
      }
      cls = applied ? C::Function : C::Constant;
    }
    switch (cls) {
      case C::Undeclared:
        throw ParseError::unknownSymbol(head.position, head.text);
      case C::Predicate:
        throw ParseError::unknownSymbol(
            head.position, head.text,
            "'" + head.text + "' at column " + std::to_string(head.position + 1) +
                " is a predicate and cannot be used as a term (for example on one side of '=')");
      case C::Constant:
        if (applied) throw ParseError::arityMismatch(head.position, head.text, 0, used);
        return Term::constant(head.text);
      case C::Function: {
        const std::size_t declared = *sig_->functionArity(head.text);
        if (declared != used) throw ParseError::arityMismatch(head.position, head.text, declared, used);
        return Term::apply(head.text, std::move(args));
      }
    }
    throw ParseError::unknownSymbol(head.position, head.text);
  }

  void checkPredicate(const Token& head, std::size_t used, bool applied) {
    using C = Signature::SymbolClass;
    C cls = sig_->classify(head.text);
    if (cls == C::Undeclared && infer_ && applied) {
      sig_->addPredicate(head.text, used);
      return;
    }
    switch (cls) {
      case C::Predicate: {
        const std::size_t declared = *sig_->predicateArity(head.text);
        if (declared != used) throw ParseError::arityMismatch(head.position, head.text, declared, used);
        return;
      }
      case C::Undeclared:
        if (!applied) {
          throw ParseError::syntax(tokens_[pos_].position, "'(' , '=' or '!=' after '" + head.text + "'",
                                   describe(peek()));
        }
        throw ParseError::unknownSymbol(head.position, head.text);
      case C::Constant:
        if (applied) throw ParseError::arityMismatch(head.position, head.text, 0, used);
        throw ParseError::syntax(peek().position, "'=' or '!=' after the constant '" + head.text + "'",
                                 describe(peek()));
      case C::Function:
        throw ParseError::syntax(peek().position, "'=' or '!=' after the term '" + head.text + "(...)'",
                                 describe(peek()));
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  Signature* sig_;
  bool infer_;
  std::vector<std::string> bound_;
  std::optional<std::pair<std::string, std::size_t>> firstFree_;
};

}  // namespace detail

/// Parses a sentence whose symbols must all be declared in `sig`.
/// Throws ParseError.
inline Formula parse(std::string_view text, const Signature& sig) {
  Signature copy = sig;
  return detail::Parser(text, &copy, false).parseSentence();
}

/// Parses a sentence without a fixed signature; symbols are declared by
/// their first use and later uses must agree in kind and arity.
inline std::pair<Formula, Signature> parseInferringSignature(std::string_view text, Signature sig = {}) {
  Formula f = detail::Parser(text, &sig, true).parseSentence();
  return {std::move(f), std::move(sig)};
}

}  // namespace folgrade
