#include "linrew/io.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace linrew {

using nlohmann::json;

ParseError::ParseError(int l, int c, const std::string &msg)
    : InputError("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + msg), line(l), column(c) {}

namespace {

struct Token {
  enum Kind { Ident, Number, Sym, End } kind = End;
  std::string text;
  int column = 0;
};

std::vector<Token> tokenize(const std::string &line, int lineno) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == '#')
      break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    int col = static_cast<int>(i) + 1;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < line.size() && (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_' || line[j] == '\''))
        ++j;
      out.push_back({Token::Ident, line.substr(i, j - i), col});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j])))
        ++j;
      out.push_back({Token::Number, line.substr(i, j - i), col});
      i = j;
    } else if (line.compare(i, 2, "->") == 0 || line.compare(i, 2, "!=") == 0) {
      out.push_back({Token::Sym, line.substr(i, 2), col});
      i += 2;
    } else if (std::string("+-*/()^:,<|=").find(c) != std::string::npos) {
      out.push_back({Token::Sym, std::string(1, c), col});
      ++i;
    } else {
      throw ParseError(lineno, col, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Token::End, "", static_cast<int>(line.size()) + 1});
  return out;
}

// Cursor over one line of tokens, with access to the system being built.
class LineParser {
public:
  LineParser(std::vector<Token> toks, int lineno, const Field &field, const Quiver &q)
      : t_(std::move(toks)), line_(lineno), field_(field), q_(q) {}

  const Token &peek(size_t ahead = 0) const { return t_[std::min(pos_ + ahead, t_.size() - 1)]; }
  Token next() { return t_[std::min(pos_++, t_.size() - 1)]; }
  bool at_end() const { return peek().kind == Token::End; }
  bool is_sym(const std::string &s, size_t ahead = 0) const {
    return peek(ahead).kind == Token::Sym && peek(ahead).text == s;
  }
  bool accept(const std::string &s) {
    if (is_sym(s)) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string &msg) const { throw ParseError(line_, peek().column, msg); }
  [[noreturn]] void fail_at(const Token &t, const std::string &msg) const { throw ParseError(line_, t.column, msg); }
  void expect(const std::string &s) {
    if (!accept(s))
      fail("expected '" + s + "'");
  }
  void expect_end() {
    if (!at_end())
      fail("unexpected '" + peek().text + "'");
  }
  std::string ident(const std::string &what) {
    if (peek().kind != Token::Ident)
      fail("expected " + what);
    return next().text;
  }
  long integer(const std::string &what) {
    bool neg = accept("-");
    if (peek().kind != Token::Number)
      fail("expected " + what);
    Token t = next();
    if (t.text.size() > 15)
      fail_at(t, "number too large");
    long v = std::stol(t.text);
    return neg ? -v : v;
  }
  mpq_class rational(const std::string &what) {
    bool neg = accept("-");
    if (peek().kind != Token::Number)
      fail("expected " + what);
    mpq_class v(next().text);
    if (accept("/")) {
      if (peek().kind != Token::Number)
        fail("expected a denominator");
      Token d = next();
      mpq_class den(d.text);
      if (den == 0)
        fail_at(d, "zero denominator");
      v /= den;
    }
    v.canonicalize();
    return neg ? mpq_class(-v) : v;
  }

  bool is_param(const Token &t) const { return t.kind == Token::Ident && field_.param && t.text == field_.param->name; }
  bool is_generator(const Token &t) const { return t.kind == Token::Ident && q_.find_generator(t.text) >= 0; }

  Scalar number_scalar(const Token &t) const { return field_.from_rational(mpq_class(t.text)); }

  Scalar param_scalar(const Token &t) const {
    try {
      return field_.parameter();
    } catch (const ArithmeticError &e) {
      fail_at(t, e.what());
    }
  }

  // Rational expression in the parameter, inside parentheses.
  Scalar expr() {
    Scalar v = field_.zero();
    bool first = true;
    for (;;) {
      int sign = 1;
      if (accept("-"))
        sign = -1;
      else if (!first && !accept("+"))
        break;
      else if (first)
        accept("+");
      Scalar t = term();
      v = sign < 0 ? v - t : v + t;
      first = false;
      if (!is_sym("+") && !is_sym("-"))
        break;
    }
    return v;
  }
  Scalar term() {
    Scalar v = power();
    for (;;) {
      if (accept("*")) {
        v = v * power();
      } else if (is_sym("/")) {
        Token op = next();
        Scalar d = power();
        try {
          v = v / d;
        } catch (const ArithmeticError &e) {
          fail_at(op, e.what());
        }
      } else if (peek().kind == Token::Number || is_param(peek()) || is_sym("(")) {
        v = v * power();
      } else {
        return v;
      }
    }
  }
  Scalar power() {
    Scalar v = atom();
    if (accept("^")) {
      long n = integer("an exponent");
      if (n < 0)
        fail("negative exponents are not supported");
      Scalar r = field_.one();
      for (long i = 0; i < n; ++i)
        r = r * v;
      v = r;
    }
    return v;
  }
  Scalar atom() {
    const Token &t = peek();
    if (t.kind == Token::Number)
      return number_scalar(next());
    if (is_param(t))
      return param_scalar(next());
    if (accept("(")) {
      Scalar v = expr();
      expect(")");
      return v;
    }
    fail("expected a number, the parameter or '('");
  }

  // Generator names with optional ^n; stops at the first other token.
  Word word_tokens() {
    Word w;
    while (is_generator(peek())) {
      Gen g = static_cast<Gen>(q_.find_generator(next().text));
      long n = 1;
      if (accept("^")) {
        n = integer("an exponent");
        if (n < 1)
          fail("exponents must be positive");
      }
      for (long i = 0; i < n; ++i)
        w.push_back(g);
    }
    return w;
  }

  Monomial monomial(const Token &where, Word w, int object_if_empty) {
    try {
      return Monomial::path(q_, std::move(w), object_if_empty);
    } catch (const CompositionError &e) {
      fail_at(where, e.what());
    }
  }

  // Polynomial whose terms must run from `source` to `target` (-1: free).
  Polynomial polynomial(int source, int target) {
    Polynomial f;
    bool first = true;
    bool any = false;
    while (!at_end() && !is_sym(")")) {
      int sign = 1;
      if (accept("-"))
        sign = -1;
      else if (!first && !accept("+"))
        fail("expected '+' or '-'");
      else if (first)
        accept("+");
      first = false;
      Token where = peek();
      Scalar c = field_.one();
      bool have_coeff = false;
      for (;;) {
        if (peek().kind == Token::Number) {
          Token n = next();
          Scalar v = number_scalar(n);
          if (is_sym("/") && peek(1).kind == Token::Number) {
            next();
            Token d = next();
            if (mpq_class(d.text) == 0)
              fail_at(d, "zero denominator");
            v = v / number_scalar(d);
          }
          c = c * v;
          have_coeff = true;
        } else if (is_param(peek())) {
          c = c * param_scalar(next());
          have_coeff = true;
        } else if (is_sym("(")) {
          next();
          c = c * expr();
          expect(")");
          have_coeff = true;
        } else {
          break;
        }
        accept("*");
      }
      Word w = word_tokens();
      if (!have_coeff && w.empty()) {
        if (peek().kind == Token::Ident)
          fail("unknown generator '" + peek().text + "'");
        fail("expected a term");
      }
      int obj = source >= 0 ? source : 0;
      Monomial m = monomial(where, std::move(w), obj);
      if (source >= 0 && (m.source != source || m.target != target))
        fail_at(where, "term is not parallel to the rule source");
      if (sign < 0)
        c = -c;
      if (f.is_zero() && f.source() < 0)
        f = Polynomial::zero(m.source, m.target);
      if (m.source != f.source() || m.target != f.target())
        fail_at(where, "terms with different boundaries");
      f.add_term(m, c);
      any = true;
    }
    if (!any)
      fail("expected a polynomial");
    return f;
  }

  size_t position() const { return pos_; }

private:
  std::vector<Token> t_;
  size_t pos_ = 0;
  int line_;
  const Field &field_;
  const Quiver &q_;
};

struct OrderDecl {
  int line = 0;
  std::vector<Token> tokens;
};

MonomialOrder parse_order(const OrderDecl &d, const Quiver &q, const Field &f) {
  LineParser lp(d.tokens, d.line, f, q);
  lp.next(); // "order"
  std::string kind = lp.ident("an order kind (deglex, weighted, block)");
  if (kind != "deglex" && kind != "weighted" && kind != "block")
    throw ParseError(d.line, d.tokens[1].column, "unknown order kind '" + kind + "'");
  const size_t n = q.num_generators();
  std::vector<int> rank(n, -1), weights(n, 0), blocks(n, 0);
  int position = 0, block = 0;
  for (;;) {
    Token t = lp.peek();
    std::string name = lp.ident("a generator name");
    int g = q.find_generator(name);
    if (g < 0)
      lp.fail_at(t, "unknown generator '" + name + "'");
    if (rank[static_cast<size_t>(g)] >= 0)
      lp.fail_at(t, "generator '" + name + "' listed twice");
    rank[static_cast<size_t>(g)] = position++;
    blocks[static_cast<size_t>(g)] = block;
    if (kind == "weighted") {
      lp.expect(":");
      long w = lp.integer("a weight");
      if (w < 1)
        lp.fail("weights must be positive");
      weights[static_cast<size_t>(g)] = static_cast<int>(w);
    }
    if (lp.accept("<"))
      continue;
    if (kind == "block" && lp.accept("|")) {
      ++block;
      continue;
    }
    break;
  }
  lp.expect_end();
  for (size_t g = 0; g < n; ++g)
    if (rank[g] < 0)
      throw ParseError(d.line, 1, "order does not mention generator '" + q.generator(static_cast<Gen>(g)).name + "'");
  if (kind == "deglex")
    return MonomialOrder::deglex(rank);
  if (kind == "weighted")
    return MonomialOrder::weighted(rank, weights);
  return MonomialOrder::block(rank, blocks);
}

} // namespace

Presentation parse_presentation(const std::string &text) {
  Field field = Field::rationals();
  Quiver q;
  bool objects_declared = false;
  bool generators_declared = false;
  std::optional<OrderDecl> order_decl;
  std::vector<std::pair<int, std::vector<Token>>> rule_lines;
  MeasureSpec measure;
  bool have_measure = false;
  std::vector<std::pair<int, std::vector<Token>>> measure_lines;
  Presentation pres;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize(line, lineno);
    if (toks.front().kind == Token::End)
      continue;
    const Token &head = toks.front();
    if (head.kind != Token::Ident)
      throw ParseError(lineno, head.column, "expected a directive");
    LineParser lp(toks, lineno, field, q);
    lp.next();
    const std::string &kw = head.text;
    if (kw == "field") {
      if (generators_declared || field.param)
        throw ParseError(lineno, head.column, "field must be declared before parameters and generators");
      std::string name = lp.ident("Q or GF(p)");
      if (name == "Q") {
        field = Field::rationals();
      } else if (name == "GF") {
        lp.expect("(");
        long p = lp.integer("a prime");
        lp.expect(")");
        if (p < 2 || p > 2147483647 || !is_prime(static_cast<std::uint32_t>(p)))
          throw ParseError(lineno, head.column, std::to_string(p) + " is not a prime");
        field = Field::prime(static_cast<std::uint32_t>(p));
      } else {
        throw ParseError(lineno, toks[1].column, "unknown field '" + name + "'");
      }
      lp.expect_end();
    } else if (kw == "param") {
      if (field.param)
        throw ParseError(lineno, head.column, "only one parameter is supported");
      auto info = std::make_shared<ParamInfo>();
      info->name = lp.ident("a parameter name");
      std::optional<mpq_class> value;
      if (lp.accept("="))
        value = lp.rational("a value");
      if (lp.accept("!="))
        while (!lp.at_end())
          info->excluded.push_back(lp.rational("an excluded value"));
      lp.expect_end();
      if (value)
        for (const auto &x : info->excluded)
          if (x == *value)
            throw ParseError(lineno, head.column, "parameter value violates its constraint");
      if (!value && field.base == Field::Base::GF)
        throw ParseError(lineno, head.column, "a symbolic parameter needs the field Q");
      field.param = info;
      field.param_value = value;
    } else if (kw == "objects") {
      if (objects_declared || generators_declared)
        throw ParseError(lineno, head.column, "objects must be declared once, before generators");
      std::vector<std::string> names;
      while (!lp.at_end()) {
        Token t = lp.peek();
        names.push_back(lp.ident("an object name"));
        if (std::count(names.begin(), names.end(), names.back()) > 1)
          lp.fail_at(t, "duplicate object '" + names.back() + "'");
      }
      if (names.empty())
        throw ParseError(lineno, head.column, "expected object names");
      q = Quiver(names);
      objects_declared = true;
    } else if (kw == "generators" || kw == "generator") {
      if (!rule_lines.empty() || order_decl)
        throw ParseError(lineno, head.column, "generators must come before the order and the rules");
      auto add = [&](const Token &t, int s, int tg, int deg) {
        if (q.find_generator(t.text) >= 0)
          lp.fail_at(t, "duplicate generator '" + t.text + "'");
        if (field.param && t.text == field.param->name)
          lp.fail_at(t, "'" + t.text + "' is the parameter name");
        q.add_generator(t.text, s, tg, deg);
      };
      if (kw == "generators") {
        if (q.objects().size() != 1)
          throw ParseError(lineno, head.column, "with several objects use 'generator NAME : S -> T'");
        if (lp.at_end())
          lp.fail("expected generator names");
        while (!lp.at_end()) {
          Token t = lp.peek();
          lp.ident("a generator name");
          add(t, 0, 0, 1);
        }
      } else {
        Token t = lp.peek();
        lp.ident("a generator name");
        int s = 0, tg = 0, deg = 1;
        if (lp.accept(":")) {
          Token so = lp.peek();
          s = q.find_object(lp.ident("a source object"));
          if (s < 0)
            lp.fail_at(so, "unknown object '" + so.text + "'");
          lp.expect("->");
          Token ta = lp.peek();
          tg = q.find_object(lp.ident("a target object"));
          if (tg < 0)
            lp.fail_at(ta, "unknown object '" + ta.text + "'");
        } else if (q.objects().size() != 1) {
          lp.fail("a boundary is required when there are several objects");
        }
        if (!lp.at_end()) {
          std::string d = lp.ident("'degree'");
          if (d != "degree")
            lp.fail("expected 'degree'");
          long v = lp.integer("a degree");
          if (v < 1)
            lp.fail("degrees must be positive");
          deg = static_cast<int>(v);
        }
        lp.expect_end();
        add(t, s, tg, deg);
      }
      generators_declared = true;
    } else if (kw == "order") {
      if (order_decl)
        throw ParseError(lineno, head.column, "order declared twice");
      order_decl = OrderDecl{lineno, toks};
    } else if (kw == "rule") {
      rule_lines.emplace_back(lineno, toks);
    } else if (kw == "measure") {
      measure_lines.emplace_back(lineno, toks);
    } else if (kw == "certificate") {
      std::string what = lp.ident("'termination' or 'convergent'");
      if (what == "termination")
        pres.claims_termination = true;
      else if (what == "convergent")
        pres.claims_convergence = pres.claims_termination = true;
      else
        throw ParseError(lineno, toks[1].column, "unknown certificate '" + what + "'");
      lp.expect_end();
    } else {
      throw ParseError(lineno, head.column, "unknown directive '" + kw + "'");
    }
  }
  if (q.num_generators() == 0)
    throw ParseError(lineno, 1, "no generators declared");

  std::optional<MonomialOrder> order;
  if (order_decl)
    order = parse_order(*order_decl, q, field);

  for (auto &[ln, toks] : measure_lines) {
    LineParser lp(toks, ln, field, q);
    lp.next();
    std::string kind = lp.ident("letter, pattern or context");
    if (kind == "context") {
      long L = lp.integer("a context length");
      if (L < 0 || L > 8)
        lp.fail("context length must be between 0 and 8");
      measure.context = static_cast<int>(L);
    } else if (kind == "letter" || kind == "pattern") {
      Token where = lp.peek();
      Word w = lp.word_tokens();
      if (w.empty())
        lp.fail("expected generator names");
      if (kind == "letter" && w.size() != 1)
        lp.fail_at(where, "a letter weight takes one generator");
      lp.expect("=");
      long v = lp.integer("a weight");
      if (kind == "letter")
        measure.letters.emplace_back(w[0], v);
      else
        measure.patterns.emplace_back(w, v);
    } else {
      lp.fail_at(toks[1], "unknown measure item '" + kind + "'");
    }
    lp.expect_end();
    have_measure = true;
  }

  std::vector<Rule> rules;
  std::set<std::string> names;
  for (auto &[ln, toks] : rule_lines) {
    LineParser lp(toks, ln, field, q);
    lp.next();
    Token nt = lp.peek();
    std::string name = lp.ident("a rule name");
    if (!names.insert(name).second)
      lp.fail_at(nt, "duplicate rule name '" + name + "'");
    lp.expect(":");
    Token st = lp.peek();
    Word w = lp.word_tokens();
    if (w.empty()) {
      if (st.kind == Token::Ident)
        lp.fail_at(st, "unknown generator '" + st.text + "'");
      lp.fail_at(st, "a rule source must be a nonempty word");
    }
    if (!lp.is_sym("->")) {
      if (lp.peek().kind == Token::Ident)
        lp.fail("unknown generator '" + lp.peek().text + "'");
      lp.fail("expected '->'");
    }
    Monomial src = lp.monomial(st, std::move(w), 0);
    lp.expect("->");
    Polynomial tgt;
    if (lp.peek().kind == Token::Number && lp.peek().text == "0" && lp.peek(1).kind == Token::End) {
      lp.next();
      tgt = Polynomial::zero(src.source, src.target);
    } else {
      tgt = lp.polynomial(src.source, src.target);
    }
    lp.expect_end();
    if (!tgt.coeff(src).is_zero())
      lp.fail_at(st, "the source occurs in its own target");
    if (tgt.source() < 0)
      tgt = Polynomial::zero(src.source, src.target);
    rules.push_back({name, src, tgt});
  }

  pres.system = Polygraph2(field, q, std::move(rules), order);
  if (have_measure)
    pres.system.set_measure_hint(measure);
  pres.N = pres.system.homogeneous_degree();
  return pres;
}

Presentation load_presentation(const std::string &text) {
  Presentation p = parse_presentation(text);
  Polygraph2 checked = certify(p.system);
  if (p.claims_termination && !checked.termination())
    throw InputError("the embedded termination certificate does not hold");
  if (p.claims_convergence && !checked.convergent())
    throw InputError("the embedded convergence certificate does not hold");
  p.system = checked;
  return p;
}

Presentation load_presentation_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_presentation(ss.str());
}

std::string format_word(const Quiver &q, const Monomial &m) {
  if (m.is_identity())
    return "1";
  std::string s;
  for (size_t i = 0; i < m.word.size();) {
    size_t j = i;
    while (j < m.word.size() && m.word[j] == m.word[i])
      ++j;
    if (!s.empty())
      s += " ";
    s += q.generator(m.word[i]).name;
    if (j - i > 1)
      s += "^" + std::to_string(j - i);
    i = j;
  }
  return s;
}

std::string format_scalar(const Scalar &s) { return s.to_string(); }

std::string format_polynomial(const Quiver &q, const Polynomial &f) {
  if (f.is_zero())
    return "0";
  std::string out;
  for (const auto &[m, c] : f.terms()) {
    bool function = c.kind() == Scalar::Kind::Function;
    bool neg = false;
    Scalar a = c;
    if (!function) {
      std::string t = c.to_string();
      if (!t.empty() && t[0] == '-') {
        neg = true;
        a = -c;
      }
    }
    if (out.empty())
      out += neg ? "-" : "";
    else
      out += neg ? " - " : " + ";
    std::string coeff;
    if (function) {
      coeff = a.to_string();
      if (coeff.find_first_of(" /-") != std::string::npos)
        coeff = "(" + coeff + ")";
    }
    else if (!a.is_one() || m.is_identity())
      coeff = a.to_string();
    if (m.is_identity()) {
      out += coeff;
    } else {
      if (!coeff.empty())
        out += coeff + " ";
      out += format_word(q, m);
    }
  }
  return out;
}

std::string print_presentation(const Polygraph2 &P, bool with_certificates) {
  std::ostringstream os;
  const Field &f = P.field();
  const Quiver &q = P.quiver();
  os << "field " << (f.base == Field::Base::Q ? "Q" : "GF(" + std::to_string(f.p) + ")") << "\n";
  if (f.param) {
    os << "param " << f.param->name;
    if (f.param_value)
      os << " = " << f.param_value->get_str();
    if (!f.param->excluded.empty()) {
      os << " !=";
      for (const auto &x : f.param->excluded)
        os << " " << x.get_str();
    }
    os << "\n";
  }
  bool simple = q.objects() == std::vector<std::string>{"*"};
  if (!simple) {
    os << "objects";
    for (const auto &o : q.objects())
      os << " " << o;
    os << "\n";
  }
  bool plain = simple && std::all_of(q.generators().begin(), q.generators().end(),
                                     [](const Generator &g) { return g.degree == 1; });
  if (plain) {
    os << "generators";
    for (const auto &g : q.generators())
      os << " " << g.name;
    os << "\n";
  } else {
    for (const auto &g : q.generators()) {
      os << "generator " << g.name;
      if (!simple)
        os << " : " << q.objects()[static_cast<size_t>(g.source)] << " -> " << q.objects()[static_cast<size_t>(g.target)];
      if (g.degree != 1)
        os << " degree " << g.degree;
      os << "\n";
    }
  }
  if (P.order()) {
    const auto &ord = *P.order();
    std::vector<Gen> gens(q.num_generators());
    for (Gen g = 0; g < gens.size(); ++g)
      gens[g] = g;
    auto block_of = [&](Gen g) { return ord.kind() == OrderKind::BlockDeglex ? ord.blocks()[g] : 0; };
    std::sort(gens.begin(), gens.end(), [&](Gen a, Gen b) {
      if (block_of(a) != block_of(b))
        return block_of(a) < block_of(b);
      return ord.rank()[a] < ord.rank()[b];
    });
    os << "order "
       << (ord.kind() == OrderKind::Deglex ? "deglex" : ord.kind() == OrderKind::WeightedDeglex ? "weighted" : "block");
    for (size_t i = 0; i < gens.size(); ++i) {
      if (i)
        os << (block_of(gens[i]) != block_of(gens[i - 1]) ? " |" : " <");
      os << " " << q.generator(gens[i]).name;
      if (ord.kind() == OrderKind::WeightedDeglex)
        os << ":" << ord.weights()[gens[i]];
    }
    os << "\n";
  }
  if (const auto &m = P.measure_hint()) {
    for (const auto &[g, w] : m->letters)
      os << "measure letter " << q.generator(g).name << " = " << w << "\n";
    for (const auto &[w, v] : m->patterns) {
      os << "measure pattern";
      for (Gen g : w)
        os << " " << q.generator(g).name;
      os << " = " << v << "\n";
    }
    os << "measure context " << m->context << "\n";
  }
  for (const auto &r : P.rules())
    os << "rule " << r.name << " : " << format_word(q, r.source) << " -> " << format_polynomial(q, r.target) << "\n";
  if (with_certificates) {
    if (P.convergent())
      os << "certificate convergent\n";
    else if (P.termination())
      os << "certificate termination\n";
  }
  return os.str();
}

Polynomial parse_polynomial(const Polygraph2 &P, const std::string &text) {
  LineParser lp(tokenize(text, 1), 1, P.field(), P.quiver());
  Polynomial f = lp.polynomial(-1, -1);
  lp.expect_end();
  return f;
}

Monomial parse_word(const Quiver &q, const std::string &text) {
  Field f = Field::rationals();
  auto toks = tokenize(text, 1);
  LineParser lp(toks, 1, f, q);
  if (lp.peek().kind == Token::Number && lp.peek().text == "1" && lp.peek(1).kind == Token::End)
    return Monomial::identity(0);
  Token start = lp.peek();
  Word w = lp.word_tokens();
  if (!lp.at_end()) {
    if (lp.peek().kind == Token::Ident)
      lp.fail("unknown generator '" + lp.peek().text + "'");
    lp.fail("unexpected '" + lp.peek().text + "'");
  }
  if (w.empty())
    lp.fail("expected a word");
  return lp.monomial(start, std::move(w), 0);
}

std::vector<Monomial> parse_monomial_list(const Quiver &q, const std::string &text) {
  std::vector<Monomial> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos)
      line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try {
      out.push_back(parse_word(q, line));
    } catch (const ParseError &e) {
      throw ParseError(lineno, e.column, std::string(e.what()).substr(std::string(e.what()).find(": ") + 2));
    }
  }
  return out;
}

// ---------------------------------------------------------------- JSON

namespace {

json order_json(const Quiver &q, const MonomialOrder &ord) {
  json j;
  j["kind"] = ord.kind() == OrderKind::Deglex ? "deglex" : ord.kind() == OrderKind::WeightedDeglex ? "weighted" : "block";
  std::vector<Gen> gens(q.num_generators());
  for (Gen g = 0; g < gens.size(); ++g)
    gens[g] = g;
  std::sort(gens.begin(), gens.end(), [&](Gen a, Gen b) { return ord.rank()[a] < ord.rank()[b]; });
  json prec = json::array();
  for (Gen g : gens)
    prec.push_back(q.generator(g).name);
  j["precedence"] = prec;
  if (ord.kind() == OrderKind::WeightedDeglex) {
    json w;
    for (Gen g = 0; g < q.num_generators(); ++g)
      w[q.generator(g).name] = ord.weights()[g];
    j["weights"] = w;
  }
  if (ord.kind() == OrderKind::BlockDeglex) {
    json b;
    for (Gen g = 0; g < q.num_generators(); ++g)
      b[q.generator(g).name] = ord.blocks()[g];
    j["blocks"] = b;
  }
  return j;
}

json termination_json(const Quiver &q, const TerminationCertificate &c) {
  json j;
  j["kind"] = to_string(c.kind);
  if (c.order)
    j["order"] = order_json(q, *c.order);
  if (c.measure) {
    json m;
    for (const auto &[g, w] : c.measure->letters)
      m["letters"].push_back({{"generator", q.generator(g).name}, {"weight", w}});
    for (const auto &[w, v] : c.measure->patterns)
      m["patterns"].push_back({{"pattern", format_word(q, Monomial(w, 0, 0))}, {"weight", v}});
    m["context"] = c.measure->context;
    j["measure"] = m;
  }
  j["notes"] = c.notes;
  return j;
}

json step_json(const Polygraph2 &P, const RewriteStep &s) {
  const Quiver &q = P.quiver();
  return {{"coeff", s.coeff.to_string()},
          {"left", format_word(q, s.left)},
          {"rule", P.rule(s.rule).name},
          {"right", format_word(q, s.right)}};
}

} // namespace

json to_json(const Polygraph2 &P) {
  const Quiver &q = P.quiver();
  json j;
  j["field"] = P.field().describe();
  j["objects"] = q.objects();
  for (const auto &g : q.generators())
    j["generators"].push_back({{"name", g.name},
                               {"source", q.objects()[static_cast<size_t>(g.source)]},
                               {"target", q.objects()[static_cast<size_t>(g.target)]},
                               {"degree", g.degree}});
  j["order"] = P.order() ? order_json(q, *P.order()) : json(nullptr);
  j["rules"] = json::array();
  for (const auto &r : P.rules())
    j["rules"].push_back({{"name", r.name},
                          {"source", format_word(q, r.source)},
                          {"target", format_polynomial(q, r.target)},
                          {"degree", degree(q, r.source)}});
  j["flags"] = {{"left_reduced", P.left_reduced()},
                {"right_reduced", P.right_reduced()},
                {"homogeneous", P.homogeneous()},
                {"N", P.homogeneous_degree()}};
  j["termination"] = P.termination() ? termination_json(q, *P.termination()) : json(nullptr);
  j["convergent"] = P.convergent();
  return j;
}

json to_json(const Polygraph2 &P, const Trace &t) {
  const Quiver &q = P.quiver();
  json j;
  j["start"] = format_polynomial(q, t.start);
  j["end"] = format_polynomial(q, t.end);
  j["steps"] = json::array();
  for (const auto &s : t.steps)
    j["steps"].push_back(step_json(P, s));
  return j;
}

json to_json(const TorTable &t) {
  json j;
  j["kmax"] = t.kmax;
  j["dmax"] = t.dmax;
  j["N"] = t.N;
  j["entries"] = json::array();
  for (int k = 0; k <= t.kmax; ++k)
    for (int i = 0; i <= t.dmax; ++i) {
      const auto &e = t.at(k, i);
      json x = {{"k", k}, {"i", i}, {"provenance", to_string(e.kind)}};
      if (e.exact())
        x["value"] = e.lo;
      else
        x["interval"] = {e.lo, e.hi};
      j["entries"].push_back(x);
    }
  return j;
}

json to_json(const Polygraph2 &, const KoszulVerdict &v) {
  json j;
  j["verdict"] = to_string(v.kind);
  j["reason"] = v.reason;
  j["global"] = v.global;
  j["scope"] = v.scope;
  j["witness"] = v.witness ? json{{"k", v.witness->first}, {"i", v.witness->second}} : json(nullptr);
  j["counting_criterion"] = {{"applicable", v.counting.applicable},
                             {"hypothesis_holds", v.counting.hypothesis_holds},
                             {"k", v.counting.k},
                             {"i", v.counting.i},
                             {"detail", v.counting.detail}};
  j["collapses"] = json::array();
  for (const auto &[k, g, a] : v.collapses.pairs)
    j["collapses"].push_back({{"dim", k}, {"cell", g}, {"partner", a}});
  j["survivors"] = v.survivors;
  j["tor"] = to_json(v.tor);
  j["kmax"] = v.kmax;
  j["dmax"] = v.dmax;
  return j;
}

// ---------------------------------------------------------------- CLI

namespace {

std::string read_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Loaded {
  Presentation pres;
  Polygraph2 work; // reduced convergent system used downstream
};

// Uses the system as is when it is reduced and convergent, otherwise
// completes it under its declared order.
bool ensure_convergent(Loaded &l, json &report, std::ostream &out) {
  const Polygraph2 &P = l.pres.system;
  if (P.convergent() && P.left_reduced() && P.right_reduced()) {
    l.work = P;
    report["completed"] = false;
    return true;
  }
  if (!P.order())
    throw InputError("the system is not convergent and declares no order to complete with");
  auto res = complete(P, *P.order());
  l.work = res.system;
  report["completed"] = true;
  json added = json::array();
  for (int id : res.added) {
    const auto &r = res.system.rule(id);
    added.push_back({{"name", r.name},
                     {"source", format_word(P.quiver(), r.source)},
                     {"target", format_polynomial(P.quiver(), r.target)}});
  }
  report["added_rules"] = added;
  if (!res.certified) {
    report["note"] = res.note;
    out << "completion did not certify a convergent system: " << res.note << "\n";
    return false;
  }
  out << "completed under the declared order (" << res.system.rules().size() << " rules)\n";
  return true;
}

std::string tor_cell(const TorEntry &e) {
  if (e.kind == TorEntry::Kind::HardZero)
    return ".";
  if (e.exact())
    return std::to_string(e.lo);
  return "[" + std::to_string(e.lo) + "," + std::to_string(e.hi) + "]";
}

void print_tor(const TorTable &t, std::ostream &out) {
  out << "Tor_k,(i)   (rows k, columns i; '.' below the l_N line)\n";
  out << "k\\i";
  for (int i = 0; i <= t.dmax; ++i)
    out << "\t" << i;
  out << "\n";
  for (int k = 0; k <= t.kmax; ++k) {
    out << k;
    for (int i = 0; i <= t.dmax; ++i)
      out << "\t" << tor_cell(t.at(k, i));
    out << "\n";
  }
}

} // namespace

CommandResult run_command(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"linrew: linear rewriting, completion and Koszul checks"};
  app.require_subcommand(1);
  std::string file, json_path, term, output, basis_file, strategy = "rightmost";
  int kmax = 4, dmax = 6, fold = 2, max_degree = 12;
  size_t max_rules = 512;
  long seed = 0;

  auto common = [&](CLI::App *sub) {
    sub->add_option("file", file, "presentation file (.lp)")->required();
    sub->add_option("--json", json_path, "write the JSON report to this path");
    sub->add_option("--seed", seed, "seed recorded in the report");
  };
  auto *nf = app.add_subcommand("nf", "normal form of a term");
  common(nf);
  nf->add_option("--term", term, "polynomial, e.g. \"x y z x\"")->required();
  nf->add_option("--strategy", strategy, "rightmost or leftmost")->check(CLI::IsMember({"rightmost", "leftmost"}));
  auto *check = app.add_subcommand("check", "termination and confluence report");
  common(check);
  auto *comp = app.add_subcommand("complete", "complete under the declared order");
  common(comp);
  comp->add_option("--max-degree", max_degree, "degree bound");
  comp->add_option("--max-rules", max_rules, "rule bound");
  comp->add_option("-o,--output", output, "write the completed system here");
  auto *br = app.add_subcommand("branchings", "critical (n-fold) branchings");
  common(br);
  br->add_option("--fold", fold, "n for n-fold branchings (2 = critical pairs)")->check(CLI::Range(2, 12));
  br->add_option("--dmax", dmax, "degree bound for n >= 3");
  auto *ch = app.add_subcommand("chains", "cells of the resolution");
  common(ch);
  ch->add_option("--kmax", kmax, "top dimension")->check(CLI::Range(0, 12));
  ch->add_option("--dmax", dmax, "degree bound")->check(CLI::Range(0, 40));
  auto *tor = app.add_subcommand("tor", "Tor dimension table");
  common(tor);
  tor->add_option("--kmax", kmax, "top homological degree")->check(CLI::Range(0, 12));
  tor->add_option("--dmax", dmax, "internal degree bound")->check(CLI::Range(0, 40));
  auto *kz = app.add_subcommand("koszul", "Koszulity verdict");
  common(kz);
  kz->add_option("--kmax", kmax, "top homological degree")->check(CLI::Range(3, 12));
  kz->add_option("--dmax", dmax, "internal degree bound")->check(CLI::Range(0, 40));
  auto *hi = app.add_subcommand("hilbert", "Hilbert function");
  common(hi);
  hi->add_option("--dmax", dmax, "degree bound")->check(CLI::Range(0, 40));
  auto *pbw = app.add_subcommand("pbw", "PBW basis check");
  common(pbw);
  pbw->add_option("--basis-file", basis_file, "candidate monomials, one per line")->required();
  pbw->add_option("--dmax", dmax, "degree bound")->check(CLI::Range(0, 40));

  CommandResult res;
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    res.exit_code = code == 0 ? kExitOk : kExitInput;
    return res;
  }

  json &rep = res.report;
  rep["schema_version"] = kSchemaVersion;
  rep["command"] = app.get_subcommands().front()->get_name();
  rep["file"] = file;
  rep["seed"] = seed;
  try {
    Loaded l;
    l.pres = load_presentation(read_file(file));
    const Polygraph2 &P = l.pres.system;
    const Quiver &q = P.quiver();
    rep["system"] = to_json(P);
    rep["presentation_N"] = l.pres.N;

    if (nf->parsed()) {
      Polynomial f = parse_polynomial(P, term);
      try {
        auto r = normal_form(f, P, strategy == "leftmost" ? Strategy::Leftmost : Strategy::Rightmost);
        rep["normal_form"] = format_polynomial(q, r.nf);
        rep["trace"] = to_json(P, r.trace);
        out << format_polynomial(q, r.nf) << "\n";
      } catch (const NonTerminationSuspected &e) {
        rep["error"] = e.what();
        rep["partial_trace"] = to_json(P, e.partial_trace);
        err << e.what() << "\n";
        res.exit_code = kExitUncertified;
      }
    } else if (check->parsed()) {
      auto t = certify_termination(P);
      if (!t.ok) {
        rep["termination"] = {{"ok", false}, {"failure", t.failure}};
        out << "termination: not certified (" << t.failure << ")\n";
        res.exit_code = kExitUncertified;
      } else {
        rep["termination"] = termination_json(q, *t.certificate);
        out << "termination: " << to_string(t.certificate->kind) << "\n  " << t.certificate->notes << "\n";
        auto c = check_confluence(P, *t.certificate);
        json entries = json::array();
        for (const auto &e : c.entries) {
          entries.push_back({{"word", format_word(q, e.branching.word(P))},
                             {"first", P.rule(e.branching.first.rule).name},
                             {"second", P.rule(e.branching.second.rule).name},
                             {"kind", to_string(e.branching.kind)},
                             {"inclusion", e.branching.inclusion},
                             {"s_polynomial", format_polynomial(q, e.s.value)},
                             {"s_normal_form", format_polynomial(q, e.s_normal_form)},
                             {"first_join", to_json(P, e.first_join)},
                             {"second_join", to_json(P, e.second_join)},
                             {"joins_complete", e.joins_complete},
                             {"confluent", e.confluent}});
        }
        rep["critical_branchings"] = entries;
        rep["convergent"] = c.convergent;
        out << "critical branchings: " << c.entries.size() << "\n";
        for (const auto &e : c.entries)
          out << "  " << format_word(q, e.branching.word(P)) << "  (" << P.rule(e.branching.first.rule).name << ", "
              << P.rule(e.branching.second.rule).name << ")  S -> " << format_polynomial(q, e.s_normal_form)
              << (e.confluent ? "  confluent" : "  NOT confluent") << "\n";
        out << "convergent: " << (c.convergent ? "yes" : "no") << "\n";
        if (!c.convergent)
          res.exit_code = kExitUncertified;
      }
    } else if (comp->parsed()) {
      if (!P.order())
        throw InputError("complete needs an order declaration");
      auto r = complete(P, *P.order(), CompletionBounds{max_degree, max_rules});
      rep["certified"] = r.certified;
      rep["bound_exceeded"] = r.bound_exceeded;
      rep["unchanged"] = r.unchanged;
      rep["note"] = r.note;
      rep["result"] = to_json(r.system);
      json added = json::array();
      for (int id : r.added) {
        const auto &rule = r.system.rule(id);
        added.push_back({{"name", rule.name},
                         {"source", format_word(q, rule.source)},
                         {"target", format_polynomial(q, rule.target)}});
        out << "added " << rule.name << " : " << format_word(q, rule.source) << " -> "
            << format_polynomial(q, rule.target) << "\n";
      }
      rep["added_rules"] = added;
      out << (r.unchanged ? "unchanged: " : "") << (r.certified ? "certified convergent" : "NOT certified") << " ("
          << r.system.rules().size() << " rules)\n";
      if (!output.empty()) {
        std::ofstream o(output);
        if (!o)
          throw InputError("cannot write " + output);
        o << print_presentation(r.system);
      }
      if (!r.certified)
        res.exit_code = kExitUncertified;
    } else if (br->parsed()) {
      rep["fold"] = fold;
      if (fold == 2) {
        json list = json::array();
        auto bs = enumerate_critical_branchings(P);
        for (const auto &b : bs) {
          list.push_back({{"word", format_word(q, b.word(P))},
                          {"first", P.rule(b.first.rule).name},
                          {"second", P.rule(b.second.rule).name},
                          {"kind", to_string(b.kind)},
                          {"inclusion", b.inclusion},
                          {"positions", {b.first_start, b.first_end, b.second_start, b.second_end}}});
          out << format_word(q, b.word(P)) << "  (" << P.rule(b.first.rule).name << ", " << P.rule(b.second.rule).name
              << ")\n";
        }
        rep["branchings"] = list;
        out << bs.size() << " critical branchings\n";
      } else {
        if (!ensure_convergent(l, rep, out)) {
          res.exit_code = kExitUncertified;
        } else {
          auto cs = enumerate_chains(l.work, fold + 1, dmax);
          json list = json::array();
          for (const auto &c : cs.dim(fold + 1)) {
            list.push_back({{"word", format_word(q, c.word)}, {"degree", c.degree}});
            out << format_word(q, c.word) << "  (degree " << c.degree << ")\n";
          }
          rep["branchings"] = list;
          out << list.size() << " critical " << fold << "-fold branchings up to degree " << dmax << "\n";
        }
      }
    } else if (ch->parsed()) {
      if (!ensure_convergent(l, rep, out)) {
        res.exit_code = kExitUncertified;
      } else {
        auto cs = enumerate_chains(l.work, kmax, dmax);
        auto table = cell_degrees(cs, l.pres.N);
        json dims = json::array();
        for (int k = 0; k <= kmax; ++k) {
          json cells = json::array();
          out << "dimension " << k << ": " << cs.count(k) << " cells";
          if (l.pres.N > 0)
            out << (table.concentrated[static_cast<size_t>(k)] ? " (l_N-concentrated)" : " (not l_N-concentrated)");
          out << "\n";
          for (const auto &c : cs.dim(k)) {
            cells.push_back({{"label", chain_label(l.work, c)}, {"word", format_word(q, c.word)}, {"degree", c.degree}});
            if (k >= 3)
              out << "  " << format_word(q, c.word) << "  (degree " << c.degree << ")\n";
          }
          dims.push_back({{"dim", k},
                          {"cells", cells},
                          {"counts_by_degree", table.counts[static_cast<size_t>(k)]},
                          {"concentrated", l.pres.N > 0 ? json(bool(table.concentrated[static_cast<size_t>(k)]))
                                                        : json(nullptr)}});
        }
        rep["chains"] = dims;
      }
    } else if (tor->parsed()) {
      if (!ensure_convergent(l, rep, out)) {
        res.exit_code = kExitUncertified;
      } else {
        auto t = tor_table(l.work, kmax, dmax, l.pres.N);
        rep["tor"] = to_json(t);
        print_tor(t, out);
      }
    } else if (kz->parsed()) {
      if (l.pres.N <= 0)
        throw InputError("koszul needs an N-homogeneous presentation");
      if (!ensure_convergent(l, rep, out)) {
        res.exit_code = kExitUncertified;
      } else {
        auto v = koszul_verdict(l.work, l.pres.N, kmax, dmax);
        rep["koszul"] = to_json(l.work, v);
        out << "verdict: " << to_string(v.kind) << " (" << v.reason << ")\n";
        if (v.witness)
          out << "witness: Tor_" << v.witness->first << ",(" << v.witness->second << ")\n";
        out << "scope: " << v.scope << "\n";
        if (v.counting.applicable)
          out << "counting criterion: " << v.counting.detail << "\n";
        if (!v.collapses.pairs.empty()) {
          out << "collapsed:";
          for (const auto &[k, g, a] : v.collapses.pairs)
            out << " (" << g << ", " << a << ")";
          out << "\n";
        }
        print_tor(v.tor, out);
      }
    } else if (hi->parsed()) {
      if (!ensure_convergent(l, rep, out)) {
        res.exit_code = kExitUncertified;
      } else {
        auto h = hilbert_series(l.work, dmax);
        rep["hilbert"] = h;
        for (size_t d = 0; d < h.size(); ++d)
          out << d << "\t" << h[d] << "\n";
      }
    } else if (pbw->parsed()) {
      auto cand = parse_monomial_list(q, read_file(basis_file));
      auto r = pbw_check(P, cand, dmax);
      rep["pbw"] = {{"dmax", r.dmax},
                    {"basis_ok", r.basis_ok},
                    {"closure_ok", r.closure_ok},
                    {"window_ok", r.window_ok},
                    {"first_failure_degree", r.first_failure_degree},
                    {"failures", r.failures},
                    {"passed", r.passed()}};
      out << "PBW up to degree " << dmax << ": " << (r.passed() ? "pass" : "fail") << "\n";
      for (const auto &f : r.failures)
        out << "  " << f << "\n";
      if (!r.passed())
        res.exit_code = kExitUncertified;
    }
  } catch (const InputError &e) {
    err << "input error: " << e.what() << "\n";
    rep["error"] = e.what();
    res.exit_code = kExitInput;
  } catch (const ArithmeticError &e) {
    err << "input error: " << e.what() << "\n";
    rep["error"] = e.what();
    res.exit_code = kExitInput;
  } catch (const CompositionError &e) {
    err << "input error: " << e.what() << "\n";
    rep["error"] = e.what();
    res.exit_code = kExitInput;
  }
  rep["exit_code"] = res.exit_code;
  if (!json_path.empty()) {
    std::ofstream o(json_path);
    if (!o) {
      err << "cannot write " << json_path << "\n";
    } else {
      o << rep.dump(2) << "\n";
    }
  }
  return res;
}

} // namespace linrew
