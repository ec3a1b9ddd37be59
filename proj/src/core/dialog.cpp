#include "dialog.hpp"

#include <algorithm>
#include <set>

#include "textio.hpp"

namespace netbench {

namespace {

[[noreturn]] void invalid(const std::string& message) {
  throw ModelError(ModelError::Kind::Validation, message);
}

const std::vector<std::string> kNoYes = {"no", "yes"};

std::string slot_var(std::string_view s) { return "slot_" + std::string(s); }
std::string done_var(std::string_view q) { return "done_" + std::string(q); }
std::string given_var(std::string_view a) { return "given_" + std::string(a); }

bool has_control(std::string_view text) {
  for (unsigned char c : text) {
    if (c < 0x20 && c != '\n' && c != '\t') return true;
  }
  return false;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
  return a * b;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return b > UINT64_MAX - a ? UINT64_MAX : a + b;
}

class DialogSimEnvironment final : public Environment {
 public:
  DialogSimEnvironment(DialogSpec ds, SimUser su)
      : ds_(std::move(ds)), su_(std::move(su)), rng_(su_.seed.value_or(0)) {}

  State observe(const Operator& op, const State&, const State& predicted) override {
    auto act = classify_operator(ds_, op.name);
    if (!act || act->kind != DialogAct::Kind::Ask) return predicted;
    const Slot& slot = *ds_.find_slot(act->element);
    std::size_t answer = 0;
    if (auto it = su_.script.find(slot.name); it != su_.script.end()) {
      answer = index_of(slot, it->second);
    } else if (su_.seed) {
      answer = static_cast<std::size_t>(rng_() % slot.answers.size());
    } else {
      answer = index_of(slot, slot.default_answer);
    }
    ++answered_;
    State observed = predicted;
    // Slot variable domains are {unknown} followed by the answers.
    observed[op.eff.bindings().front().var] = static_cast<ValueIndex>(answer + 1);
    return observed;
  }

  bool terminal() const override { return su_.patience && answered_ >= *su_.patience; }

 private:
  static std::size_t index_of(const Slot& slot, const std::string& answer) {
    for (std::size_t i = 0; i < slot.answers.size(); ++i) {
      if (slot.answers[i] == answer) return i;
    }
    return 0;
  }

  DialogSpec ds_;
  SimUser su_;
  std::mt19937_64 rng_;
  std::size_t answered_ = 0;
};

constexpr std::string_view kWaterSpec = R"(dialog water
turns 4
slot location { answers: cityA cityB ; default: cityA ; cost: 1 }
slot purpose { answers: drink irrigate ; default: drink ; cost: 1 }
query waterdata { requires: location, purpose ; cost: 2 ; utility: 0 }
advisory advise { requires: waterdata ; cost: 0 ; utility: 10 ; message: "Water quality in {location} checked against the regulations for {purpose}." }
)";

constexpr std::string_view kAllStopSpec = R"(dialog allstop
turns 3
slot topic { answers: a b ; cost: 1 }
query lookup { requires: topic ; cost: 1 ; utility: 1 }
advisory tell { requires: lookup ; cost: 1 ; utility: 0 ; message: "Nothing worth saying about {topic}." }
)";

}  // namespace

const Slot* DialogSpec::find_slot(std::string_view n) const {
  for (const auto& s : slots) {
    if (s.name == n) return &s;
  }
  return nullptr;
}

const Query* DialogSpec::find_query(std::string_view n) const {
  for (const auto& q : queries) {
    if (q.name == n) return &q;
  }
  return nullptr;
}

const Advisory* DialogSpec::find_advisory(std::string_view n) const {
  for (const auto& a : advisories) {
    if (a.name == n) return &a;
  }
  return nullptr;
}

std::vector<std::string> template_placeholders(std::string_view text) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{') continue;
    const auto close = text.find('}', i + 1);
    if (close == std::string_view::npos) invalid("unterminated placeholder in message");
    if (close == i + 1) invalid("empty placeholder in message");
    out.emplace_back(text.substr(i + 1, close - i - 1));
    i = close;
  }
  return out;
}

std::string render_template(std::string_view text,
                            const std::map<std::string, std::string>& bindings) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto close = text[i] == '{' ? text.find('}', i + 1) : std::string_view::npos;
    if (close == std::string_view::npos) {
      out += text[i];
      continue;
    }
    const std::string key(text.substr(i + 1, close - i - 1));
    auto it = bindings.find(key);
    out += it != bindings.end() ? it->second : std::string(kUnknownAnswer);
    i = close;
  }
  return out;
}

void validate_dialog(const DialogSpec& ds) {
  if (!is_identifier(ds.name)) invalid("invalid dialog name '" + ds.name + "'");
  if (ds.max_turns < 1) invalid("turns must be positive");
  if (ds.max_turns > kMaxHorizon) invalid("turns exceeds " + std::to_string(kMaxHorizon));
  if (ds.discount && (ds.discount->sign() <= 0 || *ds.discount > Rational(1))) {
    invalid("discount must be in (0, 1]");
  }

  std::set<std::string> names;
  auto declare = [&](const std::string& n, std::string_view what) {
    if (!is_identifier(n)) invalid("invalid " + std::string(what) + " name '" + n + "'");
    if (!names.insert(n).second) invalid("duplicate name " + n);
  };

  for (const auto& s : ds.slots) {
    declare(s.name, "slot");
    if (s.answers.empty()) invalid("slot " + s.name + " has no answers");
    std::set<std::string> seen;
    for (const auto& a : s.answers) {
      if (!is_value_word(a)) invalid("invalid answer '" + a + "' in slot " + s.name);
      if (a == kUnknownAnswer) invalid("answer '" + a + "' is reserved");
      if (!seen.insert(a).second) invalid("duplicate answer " + a + " in slot " + s.name);
    }
    if (!seen.count(s.default_answer)) invalid("default of slot " + s.name + " is not an answer");
    if (s.ask_cost.sign() < 0) invalid("negative cost in slot " + s.name);
    if (has_control(s.prompt)) invalid("control character in prompt of " + s.name);
  }
  for (const auto& q : ds.queries) {
    declare(q.name, "query");
    if (q.required_slots.empty()) invalid("query " + q.name + " requires no slot");
    std::set<std::string> seen;
    for (const auto& r : q.required_slots) {
      if (!ds.find_slot(r)) invalid("query " + q.name + " requires unknown slot " + r);
      if (!seen.insert(r).second) invalid("query " + q.name + " lists slot " + r + " twice");
    }
    if (q.run_cost.sign() < 0 || q.utility.sign() < 0) invalid("negative value in query " + q.name);
  }
  for (const auto& a : ds.advisories) {
    declare(a.name, "advisory");
    std::set<std::string> seen;
    for (const auto& r : a.required_queries) {
      if (!ds.find_query(r)) invalid("advisory " + a.name + " requires unknown query " + r);
      if (!seen.insert(r).second) invalid("advisory " + a.name + " lists query " + r + " twice");
    }
    for (const auto& h : template_placeholders(a.message_template)) {
      if (!ds.find_slot(h)) invalid("placeholder {" + h + "} in " + a.name + " names no slot");
    }
    if (a.cost.sign() < 0 || a.utility.sign() < 0) invalid("negative value in advisory " + a.name);
    if (has_control(a.message_template)) invalid("control character in message of " + a.name);
  }
}

std::string ask_operator(std::string_view slot) { return "ask_" + std::string(slot); }

std::string run_operator(std::string_view query, const std::vector<std::string>& answers) {
  std::string out = "run_" + std::string(query);
  for (const auto& a : answers) out += "__" + a;
  return out;
}

std::string advise_operator(std::string_view advisory) {
  return "advise_" + std::string(advisory);
}

std::uint64_t compiled_operator_count(const DialogSpec& ds) {
  std::uint64_t total = ds.slots.size() + ds.advisories.size();
  for (const auto& q : ds.queries) {
    std::uint64_t variants = 1;
    for (const auto& r : q.required_slots) {
      const Slot* s = ds.find_slot(r);
      variants = saturating_mul(variants, s ? s->answers.size() : 0);
    }
    total = saturating_add(total, variants);
  }
  return total;
}

Problem compile_dialog(const DialogSpec& ds, const Limits& limits) {
  validate_dialog(ds);
  const std::uint64_t count = compiled_operator_count(ds);
  if (count > limits.compile_ops) {
    throw LimitError("compiled dialog " + ds.name + " would have " + std::to_string(count) +
                     " operators (limit " + std::to_string(limits.compile_ops) + ")");
  }

  std::vector<VariableDef> vars;
  std::map<std::string, VarIndex> slot_index;
  std::map<std::string, VarIndex> done_index;
  for (const auto& s : ds.slots) {
    VariableDef v{slot_var(s.name), {std::string(kUnknownAnswer)}};
    v.domain.insert(v.domain.end(), s.answers.begin(), s.answers.end());
    slot_index[s.name] = static_cast<VarIndex>(vars.size());
    vars.push_back(std::move(v));
  }
  for (const auto& q : ds.queries) {
    done_index[q.name] = static_cast<VarIndex>(vars.size());
    vars.push_back({done_var(q.name), kNoYes});
  }
  std::vector<VarIndex> given_index;
  for (const auto& a : ds.advisories) {
    given_index.push_back(static_cast<VarIndex>(vars.size()));
    vars.push_back({given_var(a.name), kNoYes});
  }

  auto answer_value = [&](const Slot& s, const std::string& a) -> ValueIndex {
    for (std::size_t i = 0; i < s.answers.size(); ++i) {
      if (s.answers[i] == a) return static_cast<ValueIndex>(i + 1);
    }
    return 0;
  };

  std::vector<Operator> ops;
  ops.reserve(count);
  for (const auto& s : ds.slots) {
    const VarIndex v = slot_index[s.name];
    ops.push_back({ask_operator(s.name), PartialState({{v, 0}}),
                   PartialState({{v, answer_value(s, s.default_answer)}}), s.ask_cost, 0});
  }
  for (const auto& q : ds.queries) {
    std::vector<const Slot*> req;
    for (const auto& r : q.required_slots) req.push_back(ds.find_slot(r));
    // Odometer over the answer combinations of the required slots.
    std::vector<std::size_t> pick(req.size(), 0);
    for (bool exhausted = false; !exhausted;) {
      std::vector<Binding> pre{{done_index[q.name], 0}};
      std::vector<std::string> answers;
      for (std::size_t i = 0; i < req.size(); ++i) {
        pre.push_back({slot_index[req[i]->name], static_cast<ValueIndex>(pick[i] + 1)});
        answers.push_back(req[i]->answers[pick[i]]);
      }
      ops.push_back({run_operator(q.name, answers), PartialState(std::move(pre)),
                     PartialState({{done_index[q.name], 1}}), q.run_cost, q.utility});
      for (std::size_t i = req.size();;) {
        if (i == 0) {
          exhausted = true;
          break;
        }
        --i;
        if (++pick[i] < req[i]->answers.size()) break;
        pick[i] = 0;
      }
    }
  }
  for (std::size_t ai = 0; ai < ds.advisories.size(); ++ai) {
    const auto& a = ds.advisories[ai];
    std::vector<Binding> pre{{given_index[ai], 0}};
    for (const auto& r : a.required_queries) pre.push_back({done_index[r], 1});
    ops.push_back({advise_operator(a.name), PartialState(std::move(pre)),
                   PartialState({{given_index[ai], 1}}), a.cost, a.utility});
  }

  std::vector<ValueIndex> s0(vars.size(), 0);
  const Objective objective =
      ds.discount ? Objective::discounted(*ds.discount) : Objective::net_benefit();
  return Problem(ds.name, std::move(vars), std::move(ops), State(std::move(s0)), ds.max_turns,
                 objective);
}

std::optional<DialogAct> classify_operator(const DialogSpec& ds, std::string_view op_name) {
  auto starts = [&](std::string_view prefix) { return op_name.substr(0, prefix.size()) == prefix; };
  if (starts("ask_") && ds.find_slot(op_name.substr(4))) {
    return DialogAct{DialogAct::Kind::Ask, std::string(op_name.substr(4))};
  }
  if (starts("advise_") && ds.find_advisory(op_name.substr(7))) {
    return DialogAct{DialogAct::Kind::Advise, std::string(op_name.substr(7))};
  }
  for (const auto& q : ds.queries) {
    if (starts("run_" + q.name + "__")) return DialogAct{DialogAct::Kind::Run, q.name};
  }
  return std::nullopt;
}

std::map<std::string, std::string> slot_bindings(const DialogSpec& ds, const Problem& compiled,
                                                 const State& s) {
  std::map<std::string, std::string> out;
  for (const auto& slot : ds.slots) {
    auto v = compiled.find_variable(slot_var(slot.name));
    if (!v || s[*v] == 0) continue;
    out[slot.name] = compiled.value_name(*v, s[*v]);
  }
  return out;
}

void check_sim_user(const DialogSpec& ds, const SimUser& su) {
  for (const auto& [slot, answer] : su.script) {
    const Slot* s = ds.find_slot(slot);
    if (!s) invalid("answer script names unknown slot " + slot);
    if (std::find(s->answers.begin(), s->answers.end(), answer) == s->answers.end()) {
      invalid("answer " + answer + " is not allowed for slot " + slot);
    }
  }
}

SimUser parse_answer_script(std::string_view text) {
  SimUser su;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto trim = [](std::string_view s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string_view::npos) return std::string_view{};
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      invalid("answer script line " + std::to_string(line_no) + ": expected slot=answer");
    }
    const std::string slot(trim(line.substr(0, eq)));
    const std::string answer(trim(line.substr(eq + 1)));
    if (slot.empty() || answer.empty()) {
      invalid("answer script line " + std::to_string(line_no) + ": expected slot=answer");
    }
    if (!su.script.emplace(slot, answer).second) {
      invalid("answer script line " + std::to_string(line_no) + ": slot " + slot + " answered twice");
    }
  }
  return su;
}

std::unique_ptr<Environment> make_sim_env(const DialogSpec& ds, SimUser su) {
  check_sim_user(ds, su);
  return std::make_unique<DialogSimEnvironment>(ds, std::move(su));
}

std::optional<DialogSpec> builtin_dialog(std::string_view name) {
  if (name == "water") return parse_dialog_spec(kWaterSpec);
  if (name == "allstop") return parse_dialog_spec(kAllStopSpec);
  return std::nullopt;
}

std::vector<std::string> builtin_dialog_names() { return {"allstop", "water"}; }

}  // namespace netbench
