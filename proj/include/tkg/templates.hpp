#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tkg/error.hpp"
#include "tkg/program.hpp"

namespace tkg {

// Surface pattern for one program shape. `hop_temporal[k]` fixes the
// temporal constraint of hop k+1; slots are filled from the program.
struct QATemplate {
  std::string template_id;
  std::size_t depth = 0;
  AnswerMode answer_mode = AnswerMode::EntityClass;
  std::vector<TemporalConstraint> hop_temporal;
  std::string pattern;
};

// Display phrases for ontology terms.
struct Lexicon {
  static std::string entity_class(std::string_view label) {
    std::string s(label);
    for (char& c : s)
      if (c == '_') c = ' ';
    return s;
  }
  static std::string_view category(const std::optional<Category>& c) {
    if (!c) return "entity";
    return *c == Category::Instrument ? "instrument" : "anatomical structure";
  }
  static std::string_view predicate(Predicate p) {
    return p == Predicate::Touches ? "touch" : "come near";
  }
  static std::string_view seed_ordinal(SeedOrdinal o) {
    switch (o) {
      case SeedOrdinal::First: return "first";
      case SeedOrdinal::Last: return "last";
      case SeedOrdinal::Unique: return "";
    }
    return "";
  }
  static std::string_view hop_ordinal(HopOrdinal o) {
    return o == HopOrdinal::First ? "first" : "last";
  }
};

namespace detail {

// Splits "{name_k}" into ("name", k); k = 0 when no numeric suffix.
inline std::pair<std::string, std::size_t> split_slot(std::string_view slot) {
  const auto us = slot.rfind('_');
  if (us != std::string_view::npos && us + 1 < slot.size()) {
    std::size_t k = 0;
    bool digits = true;
    for (char c : slot.substr(us + 1)) {
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        digits = false;
        break;
      }
      k = k * 10 + static_cast<std::size_t>(c - '0');
    }
    if (digits) return {std::string(slot.substr(0, us)), k};
  }
  return {std::string(slot), 0};
}

// Resolves one slot, or nullopt when the name/index is not available for a
// program of `depth` hops. `program` may be null for a name-only check.
inline std::optional<std::string> resolve_slot(std::string_view slot, std::size_t depth,
                                               const QueryProgram* program) {
  const auto [name, k] = split_slot(slot);
  if (k == 0) {
    if (name == "seed_class") {
      if (!program) return std::string();
      if (program->seed.class_label) return Lexicon::entity_class(*program->seed.class_label);
      return std::string(Lexicon::category(program->seed.category));
    }
    if (name == "seed_ordinal")
      return program ? std::string(Lexicon::seed_ordinal(program->seed.ordinal)) : std::string();
    return std::nullopt;
  }
  if (k > depth) return std::nullopt;
  const TraverseOp* op = program ? &program->hops[k - 1] : nullptr;
  if (name == "pred") return op ? std::string(Lexicon::predicate(op->predicate)) : std::string();
  if (name == "target_cat")
    return op ? std::string(Lexicon::category(op->target_category)) : std::string();
  if (name == "hop_ordinal")
    return op ? std::string(Lexicon::hop_ordinal(op->ordinal)) : std::string();
  return std::nullopt;
}

template <typename Fn>
std::string substitute(const std::string& pattern, Fn&& resolve) {
  std::string out;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] != '{') {
      out += pattern[i];
      continue;
    }
    const auto close = pattern.find('}', i);
    if (close == std::string::npos)
      throw Error(ErrorCode::TemplateMismatch, "unterminated placeholder in \"" + pattern + "\"");
    out += resolve(std::string_view(pattern).substr(i + 1, close - i - 1));
    i = close;
  }
  return out;
}

// Collapses runs of spaces left by empty slots and drops spaces before
// punctuation.
inline std::string tidy(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == ' ' && (out.empty() || out.back() == ' ')) continue;
    if ((c == '?' || c == ',' || c == '.' || c == ';') && !out.empty() && out.back() == ' ')
      out.pop_back();
    out += c;
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

}  // namespace detail

// Placeholders of `t` that no program of its depth can fill.
inline std::vector<std::string> unresolvable_placeholders(const QATemplate& t) {
  std::vector<std::string> bad;
  detail::substitute(t.pattern, [&](std::string_view slot) {
    if (!detail::resolve_slot(slot, t.depth, nullptr)) bad.emplace_back(slot);
    return std::string();
  });
  return bad;
}

inline bool conforms(const QATemplate& t, const QueryProgram& p) {
  if (p.designed_depth() != t.depth || p.answer_mode != t.answer_mode) return false;
  for (std::size_t k = 0; k < t.hop_temporal.size() && k < p.hops.size(); ++k)
    if (p.hops[k].temporal != t.hop_temporal[k]) return false;
  return true;
}

inline std::string render_question(const QATemplate& t, const QueryProgram& p) {
  if (!conforms(t, p))
    throw Error(ErrorCode::TemplateMismatch,
                t.template_id + " expects depth " + std::to_string(t.depth) + " " +
                    std::string(to_string(t.answer_mode)) + ", program has depth " +
                    std::to_string(p.designed_depth()) + " " +
                    std::string(to_string(p.answer_mode)));
  return detail::tidy(detail::substitute(t.pattern, [&](std::string_view slot) {
    auto v = detail::resolve_slot(slot, t.depth, &p);
    if (!v)
      throw Error(ErrorCode::TemplateMismatch,
                  t.template_id + ": unresolvable placeholder {" + std::string(slot) + "}");
    return *v;
  }));
}

inline std::vector<QATemplate> builtin_templates() {
  using TC = TemporalConstraint;
  constexpr TC any = TC::Any;
  constexpr TC after = TC::AfterPrev;
  constexpr TC before = TC::BeforePrev;
  return {
      {"d1_entity", 1, AnswerMode::EntityClass, {any},
       "Which {target_cat_1} does the {seed_ordinal} {seed_class} {pred_1} {hop_ordinal_1}?"},
      {"d1_time", 1, AnswerMode::TimeSpan, {any},
       "When does the {seed_ordinal} {seed_class} {hop_ordinal_1} {pred_1} an {target_cat_1}?"},
      {"d1_count", 1, AnswerMode::Count, {any},
       "How many times does the {seed_ordinal} {seed_class} {pred_1} an {target_cat_1}?"},
      {"d2_entity_after", 2, AnswerMode::EntityClass, {any, after},
       "Take the {target_cat_1} the {seed_ordinal} {seed_class} is seen to {pred_1} "
       "{hop_ordinal_1}. Which {target_cat_2} does it {pred_2} {hop_ordinal_2} after that?"},
      {"d2_entity_before", 2, AnswerMode::EntityClass, {any, before},
       "Take the {target_cat_1} the {seed_ordinal} {seed_class} is seen to {pred_1} "
       "{hop_ordinal_1}. Which {target_cat_2} did it {pred_2} {hop_ordinal_2} before that?"},
      {"d2_time_after", 2, AnswerMode::TimeSpan, {any, after},
       "Take the {target_cat_1} the {seed_ordinal} {seed_class} is seen to {pred_1} "
       "{hop_ordinal_1}. When does it {hop_ordinal_2} {pred_2} an {target_cat_2} after that?"},
      {"d2_count_after", 2, AnswerMode::Count, {any, after},
       "Take the {target_cat_1} the {seed_ordinal} {seed_class} is seen to {pred_1} "
       "{hop_ordinal_1}. How many times does it {pred_2} an {target_cat_2} after that?"},
      {"d3_entity_after", 3, AnswerMode::EntityClass, {any, after, after},
       "Take the {target_cat_1} the {seed_ordinal} {seed_class} is seen to {pred_1} "
       "{hop_ordinal_1}; after that it goes on to {pred_2} an {target_cat_2} "
       "({hop_ordinal_2} such contact). Which {target_cat_3} does that {target_cat_2} "
       "{pred_3} {hop_ordinal_3} afterwards?"},
      {"d3_time_after", 3, AnswerMode::TimeSpan, {any, after, after},
       "Take the {target_cat_1} the {seed_ordinal} {seed_class} is seen to {pred_1} "
       "{hop_ordinal_1}; after that it goes on to {pred_2} an {target_cat_2} "
       "({hop_ordinal_2} such contact). When does that {target_cat_2} {hop_ordinal_3} "
       "{pred_3} an {target_cat_3} afterwards?"},
      {"d4_entity_after", 4, AnswerMode::EntityClass, {any, after, after, after},
       "Take the {target_cat_1} the {seed_ordinal} {seed_class} is seen to {pred_1} "
       "{hop_ordinal_1}; after that it goes on to {pred_2} an {target_cat_2} "
       "({hop_ordinal_2} such contact), which later goes on to {pred_3} an {target_cat_3} "
       "({hop_ordinal_3} such contact). Which {target_cat_4} does that {target_cat_3} "
       "{pred_4} {hop_ordinal_4} afterwards?"},
      {"d4_time_after", 4, AnswerMode::TimeSpan, {any, after, after, after},
       "Take the {target_cat_1} the {seed_ordinal} {seed_class} is seen to {pred_1} "
       "{hop_ordinal_1}; after that it goes on to {pred_2} an {target_cat_2} "
       "({hop_ordinal_2} such contact), which later goes on to {pred_3} an {target_cat_3} "
       "({hop_ordinal_3} such contact). When does that {target_cat_3} {hop_ordinal_4} "
       "{pred_4} an {target_cat_4} afterwards?"},
  };
}

}  // namespace tkg
