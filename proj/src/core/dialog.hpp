#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "exec.hpp"
#include "limits.hpp"
#include "model.hpp"

namespace netbench {

struct Slot {
  std::string name;
  std::string prompt;
  std::vector<std::string> answers;
  std::string default_answer;
  Rational ask_cost;

  friend bool operator==(const Slot&, const Slot&) = default;
};

struct Query {
  std::string name;
  std::vector<std::string> required_slots;
  Rational run_cost;
  Rational utility;

  friend bool operator==(const Query&, const Query&) = default;
};

struct Advisory {
  std::string name;
  std::vector<std::string> required_queries;
  // Text with {slot} placeholders.
  std::string message_template;
  Rational cost;
  Rational utility;

  friend bool operator==(const Advisory&, const Advisory&) = default;
};

struct DialogSpec {
  std::string name;
  std::vector<Slot> slots;
  std::vector<Query> queries;
  std::vector<Advisory> advisories;
  std::uint32_t max_turns = 1;
  std::optional<Rational> discount;

  const Slot* find_slot(std::string_view name) const;
  const Query* find_query(std::string_view name) const;
  const Advisory* find_advisory(std::string_view name) const;

  friend bool operator==(const DialogSpec&, const DialogSpec&) = default;
};

// Reserved domain value of every slot variable before the slot is asked.
inline constexpr std::string_view kUnknownAnswer = "unknown";

// Throws ModelError(Validation) naming the first offending element.
void validate_dialog(const DialogSpec& ds);

// Placeholder names in a message template, in order of appearance. Throws
// ModelError(Validation) on an unterminated or empty placeholder.
std::vector<std::string> template_placeholders(std::string_view text);

// Replaces {slot} with bindings[slot], or with kUnknownAnswer when unbound.
std::string render_template(std::string_view text,
                            const std::map<std::string, std::string>& bindings);

// Operator naming shared by the compiler, the simulator and the service.
std::string ask_operator(std::string_view slot);
std::string run_operator(std::string_view query, const std::vector<std::string>& answers);
std::string advise_operator(std::string_view advisory);

// Exact operator count of the compiled problem.
std::uint64_t compiled_operator_count(const DialogSpec& ds);

// Throws LimitError when the operator count exceeds limits.compile_ops.
Problem compile_dialog(const DialogSpec& ds, const Limits& limits = {});

// What an operator of a compiled dialog does, recovered from its name.
struct DialogAct {
  enum class Kind { Ask, Run, Advise } kind;
  std::string element;  // slot, query or advisory name
};
std::optional<DialogAct> classify_operator(const DialogSpec& ds, std::string_view op_name);

// Slot answers keyed by slot name, read off a compiled-problem state.
std::map<std::string, std::string> slot_bindings(const DialogSpec& ds, const Problem& compiled,
                                                 const State& s);

// Simulated user: scripted answers per slot, with unscripted slots answered
// by a seeded random draw when a seed is set and by the default otherwise.
struct SimUser {
  std::map<std::string, std::string> script;
  std::optional<std::uint64_t> seed;
  // User leaves after answering this many questions.
  std::optional<std::size_t> patience;
};

// Throws ModelError(Validation) when a scripted slot or answer is unknown.
void check_sim_user(const DialogSpec& ds, const SimUser& su);

// Parses "slot=answer" lines ('#' comments, blank lines ignored).
SimUser parse_answer_script(std::string_view text);

std::unique_ptr<Environment> make_sim_env(const DialogSpec& ds, SimUser su);

// Built-in specs by name ("water", "allstop"); nullopt if unknown.
std::optional<DialogSpec> builtin_dialog(std::string_view name);
std::vector<std::string> builtin_dialog_names();

}  // namespace netbench
