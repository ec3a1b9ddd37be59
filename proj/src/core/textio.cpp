#include "textio.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

namespace netbench {

std::string_view to_string(SourceError::Kind kind) {
  switch (kind) {
    case SourceError::Kind::Lex: return "lex";
    case SourceError::Kind::Syntax: return "syntax";
    case SourceError::Kind::Semantic: return "semantic";
  }
  return "?";
}

std::string SourceError::render() const {
  return std::to_string(line_) + ":" + std::to_string(column_) + ": " +
         std::string(to_string(kind_)) + " error: " + what();
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Word, String, LBrace, RBrace, Colon, Semi, Comma, Eq, Slash, Dash, Newline, End };

struct Pos {
  int line = 1;
  int col = 1;
};

struct Token {
  Tok kind;
  std::string text;
  Pos pos;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::Word: return "'" + t.text + "'";
    case Tok::String: return "string";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Colon: return "':'";
    case Tok::Semi: return "';'";
    case Tok::Comma: return "','";
    case Tok::Eq: return "'='";
    case Tok::Slash: return "'/'";
    case Tok::Dash: return "'-'";
    case Tok::Newline: return "end of line";
    case Tok::End: return "end of input";
  }
  return "token";
}

bool word_char(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '-';
}

[[noreturn]] void fail(SourceError::Kind kind, Pos pos, const std::string& message) {
  throw SourceError(kind, pos.line, pos.col, message);
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  Pos pos;
  std::size_t i = 0;
  auto advance = [&](std::size_t n = 1) {
    i += n;
    pos.col += static_cast<int>(n);
  };

  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    const Pos start = pos;
    if (c == '\n') {
      out.push_back({Tok::Newline, "", start});
      ++i;
      ++pos.line;
      pos.col = 1;
    } else if (c == ' ' || c == '\t' || c == '\r') {
      advance();
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance();
    } else if (c == '"') {
      advance();
      std::string value;
      for (;;) {
        if (i >= text.size()) fail(SourceError::Kind::Lex, start, "unterminated string");
        const auto d = static_cast<unsigned char>(text[i]);
        if (d == '"') {
          advance();
          break;
        }
        if (d == '\n') fail(SourceError::Kind::Lex, start, "unterminated string");
        if (d < 0x20 && d != '\t') fail(SourceError::Kind::Lex, pos, "control character in string");
        if (d == '\\') {
          if (i + 1 >= text.size()) fail(SourceError::Kind::Lex, pos, "unterminated escape");
          const char e = text[i + 1];
          switch (e) {
            case '"': value += '"'; break;
            case '\\': value += '\\'; break;
            case 'n': value += '\n'; break;
            case 't': value += '\t'; break;
            default: fail(SourceError::Kind::Lex, pos, std::string("unknown escape \\") + e);
          }
          advance(2);
          continue;
        }
        value += static_cast<char>(d);
        advance();
      }
      out.push_back({Tok::String, std::move(value), start});
    } else if (word_char(c) && c != '-') {
      std::size_t j = i;
      while (j < text.size() && word_char(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({Tok::Word, std::string(text.substr(i, j - i)), start});
      advance(j - i);
    } else {
      Tok kind;
      switch (c) {
        case '{': kind = Tok::LBrace; break;
        case '}': kind = Tok::RBrace; break;
        case ':': kind = Tok::Colon; break;
        case ';': kind = Tok::Semi; break;
        case ',': kind = Tok::Comma; break;
        case '=': kind = Tok::Eq; break;
        case '/': kind = Tok::Slash; break;
        case '-': kind = Tok::Dash; break;
        default: {
          std::string shown = (c >= 0x20 && c < 0x7f) ? std::string(1, static_cast<char>(c))
                                                      : "\\x" + std::to_string(c);
          fail(SourceError::Kind::Lex, start, "unexpected character '" + shown + "'");
        }
      }
      out.push_back({kind, "", start});
      advance();
    }
  }
  out.push_back({Tok::End, "", pos});
  return out;
}

// ---------------------------------------------------------------------------
// Shared parsing machinery

struct Name {
  std::string text;
  Pos pos;
};

struct BindingAst {
  Name var;
  Name value;
};

struct RationalAst {
  Rational value;
  Pos pos;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(lex(text)) {}

 protected:
  const Token& peek() { return tokens_[pos_]; }

  Token next() {
    Token t = peek();
    if (t.kind != Tok::End) ++pos_;
    return t;
  }

  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    next();
    return true;
  }

  Token expect(Tok kind, const std::string& what) {
    const Token& t = peek();
    if (t.kind != kind) syntax(t, "expected " + what + ", found " + describe(t));
    return next();
  }

  [[noreturn]] void syntax(const Token& t, const std::string& message) {
    fail(SourceError::Kind::Syntax, t.pos, message);
  }

  void skip_blank_lines() {
    while (tokens_[pos_].kind == Tok::Newline) ++pos_;
  }

  void end_statement() {
    const Token& t = peek();
    if (t.kind == Tok::Newline) {
      next();
    } else if (t.kind != Tok::End) {
      syntax(t, "expected end of line, found " + describe(t));
    }
  }

  Name identifier(const std::string& what) {
    Token t = expect(Tok::Word, what);
    if (!is_identifier(t.text)) syntax(t, "invalid " + what + " '" + t.text + "'");
    return {t.text, t.pos};
  }

  Name value_word(const std::string& what) {
    Token t = expect(Tok::Word, what);
    return {t.text, t.pos};
  }

  RationalAst rational(const std::string& what) {
    const Token first = expect(Tok::Word, what);
    std::string text = first.text;
    if (accept(Tok::Slash)) {
      const Token den = expect(Tok::Word, "denominator");
      text += "/" + den.text;
    }
    auto r = Rational::parse(text);
    if (!r) {
      if (text.find('/') != std::string::npos && text.substr(text.find('/') + 1).find_first_not_of('0') == std::string::npos) {
        fail(SourceError::Kind::Semantic, first.pos, "zero denominator in " + what);
      }
      syntax(first, "expected non-negative rational for " + what + ", found '" + text + "'");
    }
    return {*r, first.pos};
  }

  // Non-negative decimal integer bounded by max.
  std::uint32_t count(const std::string& what, std::uint32_t max) {
    const Token t = expect(Tok::Word, what);
    if (t.text.find_first_not_of("0123456789") != std::string::npos) {
      syntax(t, "expected integer for " + what + ", found '" + t.text + "'");
    }
    const auto nz = t.text.find_first_not_of('0');
    const std::string digits = nz == std::string::npos ? "0" : t.text.substr(nz);
    if (digits.size() > 9 || std::stoul(digits) > max) {
      fail(SourceError::Kind::Semantic, t.pos, what + " exceeds " + std::to_string(max));
    }
    const auto n = static_cast<std::uint32_t>(std::stoul(digits));
    if (n == 0) fail(SourceError::Kind::Semantic, t.pos, what + " must be positive");
    return n;
  }

  BindingAst binding() {
    Name var = identifier("variable name");
    expect(Tok::Eq, "'='");
    Name val = value_word("value");
    return {std::move(var), std::move(val)};
  }

  // '-' or binding (',' binding)*
  std::vector<BindingAst> binding_list() {
    std::vector<BindingAst> out;
    if (accept(Tok::Dash)) return out;
    out.push_back(binding());
    while (accept(Tok::Comma)) out.push_back(binding());
    return out;
  }

  // Parses "{ field: ... ; field: ... }". Fields are separated by ';' or a
  // line break. The callback consumes the value of the named field and
  // returns false for unknown field names.
  template <typename F>
  void block(F&& field) {
    expect(Tok::LBrace, "'{'");
    skip_blank_lines();
    std::set<std::string> seen;
    while (peek().kind != Tok::RBrace) {
      const Token key = expect(Tok::Word, "field name");
      if (!seen.insert(key.text).second) {
        fail(SourceError::Kind::Semantic, key.pos, "duplicate field " + key.text);
      }
      expect(Tok::Colon, "':'");
      if (!field(key)) syntax(key, "unknown field '" + key.text + "'");
      const Token& sep = peek();
      if (sep.kind == Tok::RBrace) break;
      if (sep.kind != Tok::Semi && sep.kind != Tok::Newline) {
        syntax(sep, "expected ';', end of line or '}', found " + describe(sep));
      }
      next();
      skip_blank_lines();
    }
    next();
  }

  Pos end_pos() { return tokens_.back().pos; }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

[[noreturn]] void semantic(Pos pos, const std::string& message) {
  fail(SourceError::Kind::Semantic, pos, message);
}

// ---------------------------------------------------------------------------
// Problem files

struct VarAst {
  Name name;
  std::vector<Name> values;
};

struct OpAst {
  Name name;
  std::vector<BindingAst> pre;
  std::vector<BindingAst> eff;
  Rational cost;
  Rational utility;
};

struct ObjectiveAst {
  Pos pos;
  ObjectiveKind kind;
  std::optional<RationalAst> gamma;
  std::optional<std::vector<BindingAst>> goal;
};

class ProblemParser : Parser {
 public:
  using Parser::Parser;

  Problem parse() {
    skip_blank_lines();
    const Token head = peek();
    if (head.kind != Tok::Word || head.text != "problem") {
      syntax(head, "expected 'problem', found " + describe(head));
    }
    next();
    name_ = identifier("problem name");
    end_statement();

    for (;;) {
      skip_blank_lines();
      const Token t = peek();
      if (t.kind == Tok::End) break;
      if (t.kind != Tok::Word) syntax(t, "expected a declaration, found " + describe(t));
      next();
      if (t.text == "var") {
        VarAst v{identifier("variable name"), {}};
        expect(Tok::LBrace, "'{'");
        while (peek().kind == Tok::Word) v.values.push_back(value_word("value"));
        expect(Tok::RBrace, "value or '}'");
        vars_.push_back(std::move(v));
      } else if (t.text == "init") {
        do {
          init_.push_back(binding());
        } while (peek().kind == Tok::Word);
      } else if (t.text == "horizon") {
        if (horizon_) semantic(t.pos, "duplicate horizon");
        horizon_ = count("horizon", kMaxHorizon);
      } else if (t.text == "objective") {
        if (objective_) semantic(t.pos, "duplicate objective");
        objective_ = objective(t.pos);
      } else if (t.text == "op") {
        ops_.push_back(op());
      } else if (t.text == "problem") {
        semantic(t.pos, "duplicate problem declaration");
      } else {
        syntax(t, "unknown declaration '" + t.text + "'");
      }
      end_statement();
    }
    return resolve();
  }

 private:
  ObjectiveAst objective(Pos pos) {
    ObjectiveAst o{pos, ObjectiveKind::NetBenefit, std::nullopt, std::nullopt};
    const Token kind = expect(Tok::Word, "objective kind");
    if (kind.text == "netbenefit") {
      o.kind = ObjectiveKind::NetBenefit;
    } else if (kind.text == "discounted") {
      o.kind = ObjectiveKind::DiscountedNetBenefit;
      o.gamma = rational("discount");
    } else if (kind.text == "mincost") {
      o.kind = ObjectiveKind::MinCost;
      const Token& g = peek();
      if (g.kind == Tok::Word) {
        if (g.text != "goal") syntax(g, "expected 'goal', found " + describe(g));
        next();
        std::vector<BindingAst> goal;
        do {
          goal.push_back(binding());
        } while (peek().kind == Tok::Word);
        o.goal = std::move(goal);
      }
    } else {
      syntax(kind, "unknown objective '" + kind.text + "'");
    }
    return o;
  }

  OpAst op() {
    OpAst o{identifier("operator name"), {}, {}, 0, 0};
    block([&](const Token& key) {
      if (key.text == "pre") {
        o.pre = binding_list();
      } else if (key.text == "eff") {
        o.eff = binding_list();
      } else if (key.text == "cost") {
        o.cost = rational("cost").value;
      } else if (key.text == "utility") {
        o.utility = rational("utility").value;
      } else {
        return false;
      }
      return true;
    });
    return o;
  }

  std::vector<Binding> resolve_bindings(const std::vector<BindingAst>& in) const {
    std::vector<Binding> out;
    std::set<VarIndex> bound;
    for (const auto& b : in) {
      auto it = var_index_.find(b.var.text);
      if (it == var_index_.end()) semantic(b.var.pos, "unknown variable " + b.var.text);
      const VarIndex v = it->second;
      const auto& dom = vars_[v].values;
      auto vit = std::find_if(dom.begin(), dom.end(), [&](const Name& n) { return n.text == b.value.text; });
      if (vit == dom.end()) {
        semantic(b.value.pos, "value " + b.value.text + " not in domain of " + b.var.text);
      }
      if (!bound.insert(v).second) semantic(b.var.pos, "variable " + b.var.text + " bound twice");
      out.push_back({v, static_cast<ValueIndex>(vit - dom.begin())});
    }
    return out;
  }

  Problem resolve() {
    std::vector<VariableDef> vars;
    for (VarIndex i = 0; i < vars_.size(); ++i) {
      const auto& v = vars_[i];
      if (!var_index_.emplace(v.name.text, i).second) {
        semantic(v.name.pos, "duplicate variable " + v.name.text);
      }
      if (v.values.empty()) semantic(v.name.pos, "variable " + v.name.text + " has an empty domain");
      if (v.values.size() > 0xFFFF) semantic(v.name.pos, "domain of " + v.name.text + " too large");
      std::set<std::string> seen;
      VariableDef def{v.name.text, {}};
      for (const auto& val : v.values) {
        if (!seen.insert(val.text).second) semantic(val.pos, "duplicate value " + val.text);
        def.domain.push_back(val.text);
      }
      vars.push_back(std::move(def));
    }

    std::vector<std::optional<ValueIndex>> init(vars.size());
    for (const auto& b : init_) {
      const auto resolved = resolve_bindings({b});
      auto& slot = init[resolved[0].var];
      if (slot) semantic(b.var.pos, "duplicate init binding for " + b.var.text);
      slot = resolved[0].value;
    }
    std::vector<ValueIndex> s0;
    for (VarIndex i = 0; i < vars.size(); ++i) {
      if (!init[i]) semantic(vars_[i].name.pos, "variable " + vars[i].name + " has no initial value");
      s0.push_back(*init[i]);
    }

    if (!horizon_) semantic(end_pos(), "missing horizon");
    if (!objective_) semantic(end_pos(), "missing objective");

    Objective objective;
    switch (objective_->kind) {
      case ObjectiveKind::NetBenefit: objective = Objective::net_benefit(); break;
      case ObjectiveKind::DiscountedNetBenefit: {
        const auto& g = *objective_->gamma;
        if (g.value.is_zero() || g.value > Rational(1)) semantic(g.pos, "discount must be in (0, 1]");
        objective = Objective::discounted(g.value);
        break;
      }
      case ObjectiveKind::MinCost: {
        std::optional<PartialState> goal;
        if (objective_->goal) goal = PartialState(resolve_bindings(*objective_->goal));
        objective = Objective::min_cost(std::move(goal));
        break;
      }
    }

    std::vector<Operator> ops;
    std::set<std::string> op_names;
    for (const auto& o : ops_) {
      if (!op_names.insert(o.name.text).second) semantic(o.name.pos, "duplicate operator " + o.name.text);
      ops.push_back({o.name.text, PartialState(resolve_bindings(o.pre)),
                     PartialState(resolve_bindings(o.eff)), o.cost, o.utility});
    }

    try {
      return Problem(name_.text, std::move(vars), std::move(ops), State(std::move(s0)), *horizon_,
                     std::move(objective));
    } catch (const ModelError& e) {
      semantic(name_.pos, e.what());
    }
  }

  Name name_;
  std::vector<VarAst> vars_;
  std::vector<BindingAst> init_;
  std::optional<std::uint32_t> horizon_;
  std::optional<ObjectiveAst> objective_;
  std::vector<OpAst> ops_;
  std::map<std::string, VarIndex> var_index_;
};

std::string join_bindings(const Problem& pr, const PartialState& p, std::string_view sep) {
  if (p.empty()) return "-";
  std::string out;
  for (const auto& b : p.bindings()) {
    if (!out.empty()) out += sep;
    out += pr.variables()[b.var].name + "=" + pr.value_name(b.var, b.value);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dialog specs

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

class DialogParser : Parser {
 public:
  using Parser::Parser;

  DialogSpec parse() {
    skip_blank_lines();
    const Token head = peek();
    if (head.kind != Tok::Word || head.text != "dialog") {
      syntax(head, "expected 'dialog', found " + describe(head));
    }
    next();
    name_ = identifier("dialog name");
    spec_.name = name_.text;
    end_statement();

    for (;;) {
      skip_blank_lines();
      const Token t = peek();
      if (t.kind == Tok::End) break;
      if (t.kind != Tok::Word) syntax(t, "expected a declaration, found " + describe(t));
      next();
      if (t.text == "turns") {
        if (turns_) semantic(t.pos, "duplicate turns");
        turns_ = count("turns", kMaxHorizon);
      } else if (t.text == "discount") {
        if (discount_) semantic(t.pos, "duplicate discount");
        discount_ = rational("discount");
      } else if (t.text == "slot") {
        slot();
      } else if (t.text == "query") {
        query();
      } else if (t.text == "advisory") {
        advisory();
      } else if (t.text == "dialog") {
        semantic(t.pos, "duplicate dialog declaration");
      } else {
        syntax(t, "unknown declaration '" + t.text + "'");
      }
      end_statement();
    }
    return resolve();
  }

 private:
  void declare(const Name& n) {
    if (!names_.emplace(n.text, n.pos).second) semantic(n.pos, "duplicate name " + n.text);
  }

  std::vector<Name> name_list(const std::string& what) {
    std::vector<Name> out;
    if (accept(Tok::Dash)) return out;
    out.push_back(identifier(what));
    while (accept(Tok::Comma)) out.push_back(identifier(what));
    return out;
  }

  void slot() {
    const Name name = identifier("slot name");
    declare(name);
    Slot s{name.text, name.text + "?", {}, {}, 0};
    std::optional<Name> dflt;
    std::vector<Name> answers;
    block([&](const Token& key) {
      if (key.text == "answers") {
        while (peek().kind == Tok::Word) answers.push_back(value_word("answer"));
        if (answers.empty()) semantic(key.pos, "slot " + name.text + " needs at least one answer");
      } else if (key.text == "default") {
        dflt = value_word("default answer");
      } else if (key.text == "cost") {
        s.ask_cost = rational("cost").value;
      } else if (key.text == "prompt") {
        s.prompt = expect(Tok::String, "prompt string").text;
      } else {
        return false;
      }
      return true;
    });
    if (answers.empty()) semantic(name.pos, "slot " + name.text + " has no answers");
    std::set<std::string> seen;
    for (const auto& a : answers) {
      if (a.text == kUnknownAnswer) semantic(a.pos, "answer '" + a.text + "' is reserved");
      if (!seen.insert(a.text).second) semantic(a.pos, "duplicate answer " + a.text);
      s.answers.push_back(a.text);
    }
    if (dflt) {
      if (!seen.count(dflt->text)) semantic(dflt->pos, "default " + dflt->text + " is not an answer");
      s.default_answer = dflt->text;
    } else {
      s.default_answer = s.answers.front();
    }
    slot_index_[s.name] = spec_.slots.size();
    spec_.slots.push_back(std::move(s));
  }

  void query() {
    const Name name = identifier("query name");
    declare(name);
    Query q{name.text, {}, 0, 0};
    std::optional<std::vector<Name>> req;
    block([&](const Token& key) {
      if (key.text == "requires") {
        req = name_list("slot name");
      } else if (key.text == "cost") {
        q.run_cost = rational("cost").value;
      } else if (key.text == "utility") {
        q.utility = rational("utility").value;
      } else {
        return false;
      }
      return true;
    });
    if (!req || req->empty()) semantic(name.pos, "query " + name.text + " requires no slot");
    pending_queries_.push_back({spec_.queries.size(), *req});
    spec_.queries.push_back(std::move(q));
  }

  void advisory() {
    const Name name = identifier("advisory name");
    declare(name);
    Advisory a{name.text, {}, name.text, 0, 0};
    std::vector<Name> req;
    Pos message_pos = name.pos;
    block([&](const Token& key) {
      if (key.text == "requires") {
        req = name_list("query name");
      } else if (key.text == "cost") {
        a.cost = rational("cost").value;
      } else if (key.text == "utility") {
        a.utility = rational("utility").value;
      } else if (key.text == "message") {
        const Token t = expect(Tok::String, "message string");
        a.message_template = t.text;
        message_pos = t.pos;
      } else {
        return false;
      }
      return true;
    });
    pending_advisories_.push_back({spec_.advisories.size(), req, message_pos});
    spec_.advisories.push_back(std::move(a));
  }

  DialogSpec resolve() {
    for (auto& [qi, req] : pending_queries_) {
      std::set<std::string> seen;
      for (const auto& r : req) {
        if (!slot_index_.count(r.text)) semantic(r.pos, "unknown slot " + r.text);
        if (!seen.insert(r.text).second) semantic(r.pos, "slot " + r.text + " listed twice");
        spec_.queries[qi].required_slots.push_back(r.text);
      }
    }
    for (auto& [ai, req, message_pos] : pending_advisories_) {
      std::set<std::string> seen;
      for (const auto& r : req) {
        if (!spec_.find_query(r.text)) semantic(r.pos, "unknown query " + r.text);
        if (!seen.insert(r.text).second) semantic(r.pos, "query " + r.text + " listed twice");
        spec_.advisories[ai].required_queries.push_back(r.text);
      }
      std::vector<std::string> holes;
      try {
        holes = template_placeholders(spec_.advisories[ai].message_template);
      } catch (const ModelError& e) {
        semantic(message_pos, e.what());
      }
      for (const auto& h : holes) {
        if (!slot_index_.count(h)) semantic(message_pos, "placeholder {" + h + "} names no slot");
      }
    }
    if (!turns_) semantic(end_pos(), "missing turns");
    spec_.max_turns = *turns_;
    if (discount_) {
      if (discount_->value.is_zero() || discount_->value > Rational(1)) {
        semantic(discount_->pos, "discount must be in (0, 1]");
      }
      spec_.discount = discount_->value;
    }
    try {
      validate_dialog(spec_);
    } catch (const ModelError& e) {
      semantic(name_.pos, e.what());
    }
    return std::move(spec_);
  }

  struct PendingQuery {
    std::size_t index;
    std::vector<Name> required;
  };
  struct PendingAdvisory {
    std::size_t index;
    std::vector<Name> required;
    Pos message_pos;
  };

  Name name_;
  DialogSpec spec_;
  std::optional<std::uint32_t> turns_;
  std::optional<RationalAst> discount_;
  std::map<std::string, Pos> names_;
  std::map<std::string, std::size_t> slot_index_;
  std::vector<PendingQuery> pending_queries_;
  std::vector<PendingAdvisory> pending_advisories_;
};

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  if (items.empty()) return "-";
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

}  // namespace

Problem parse_problem(std::string_view text) { return ProblemParser(text).parse(); }

std::string serialize_problem(const Problem& pr) {
  std::ostringstream out;
  out << "problem " << pr.name() << '\n';
  for (const auto& v : pr.variables()) {
    out << "var " << v.name << " {";
    for (const auto& val : v.domain) out << ' ' << val;
    out << " }\n";
  }
  out << "init";
  for (VarIndex i = 0; i < pr.variables().size(); ++i) {
    out << ' ' << pr.variables()[i].name << '=' << pr.value_name(i, pr.initial()[i]);
  }
  out << '\n';
  out << "horizon " << pr.horizon() << '\n';
  const auto& obj = pr.objective();
  out << "objective " << to_string(obj.kind);
  if (obj.kind == ObjectiveKind::DiscountedNetBenefit) out << ' ' << obj.gamma;
  if (obj.kind == ObjectiveKind::MinCost && obj.goal) {
    out << " goal " << join_bindings(pr, *obj.goal, " ");
  }
  out << '\n';
  for (const auto& o : pr.operators()) {
    out << "op " << o.name << " { pre: " << join_bindings(pr, o.pre, ", ")
        << " ; eff: " << join_bindings(pr, o.eff, ", ") << " ; cost: " << o.cost
        << " ; utility: " << o.utility << " }\n";
  }
  return out.str();
}

DialogSpec parse_dialog_spec(std::string_view text) { return DialogParser(text).parse(); }

std::string serialize_dialog_spec(const DialogSpec& ds) {
  std::ostringstream out;
  out << "dialog " << ds.name << '\n';
  out << "turns " << ds.max_turns << '\n';
  if (ds.discount) out << "discount " << *ds.discount << '\n';
  for (const auto& s : ds.slots) {
    out << "slot " << s.name << " { answers:";
    for (const auto& a : s.answers) out << ' ' << a;
    out << " ; default: " << s.default_answer << " ; cost: " << s.ask_cost
        << " ; prompt: " << quote(s.prompt) << " }\n";
  }
  for (const auto& q : ds.queries) {
    out << "query " << q.name << " { requires: " << join(q.required_slots, ", ")
        << " ; cost: " << q.run_cost << " ; utility: " << q.utility << " }\n";
  }
  for (const auto& a : ds.advisories) {
    out << "advisory " << a.name << " { requires: " << join(a.required_queries, ", ")
        << " ; cost: " << a.cost << " ; utility: " << a.utility
        << " ; message: " << quote(a.message_template) << " }\n";
  }
  return out.str();
}

}  // namespace netbench
