#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "dialog.hpp"
#include "model.hpp"

namespace netbench {

// A rejected input. line and column are 1-based and point into the text.
class SourceError : public std::runtime_error {
 public:
  enum class Kind { Lex, Syntax, Semantic };

  SourceError(Kind kind, int line, int column, const std::string& message)
      : std::runtime_error(message), kind_(kind), line_(line), column_(column) {}

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }
  // "<line>:<column>: <kind> error: <message>"
  std::string render() const;

 private:
  Kind kind_;
  int line_;
  int column_;
};

std::string_view to_string(SourceError::Kind kind);

// Problem files (.plan.txt):
//
//   problem <name>
//   var <name> { <value> ... }
//   init <var>=<value> ...
//   horizon <k>
//   objective netbenefit | discounted <gamma> | mincost [goal <var>=<value> ...]
//   op <name> { pre: <var>=<value>, ... ; eff: ... ; cost: <rat> ; utility: <rat> }
//
// '#' starts a comment. An empty pre/eff is written "-". Omitted op fields
// default to empty/zero. Throws SourceError.
Problem parse_problem(std::string_view text);

// Canonical text: vars, init, horizon, objective, then ops in name order.
std::string serialize_problem(const Problem& pr);

// Dialog specs (.dlg.txt):
//
//   dialog <name>
//   turns <max_turns>
//   discount <gamma>                                  (optional)
//   slot <name> { answers: <v> ... ; default: <v> ; cost: <rat> ; prompt: "<text>" }
//   query <name> { requires: <slot>, ... ; cost: <rat> ; utility: <rat> }
//   advisory <name> { requires: <query>, ... ; cost: <rat> ; utility: <rat> ; message: "<text>" }
//
// Throws SourceError.
DialogSpec parse_dialog_spec(std::string_view text);

std::string serialize_dialog_spec(const DialogSpec& ds);

}  // namespace netbench
