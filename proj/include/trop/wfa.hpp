// wfa.hpp
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trop/weight.hpp"

namespace trop {

using StateId = int;
using LetterId = int;
using Word = std::vector<LetterId>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Transition {
  StateId from;
  LetterId letter;
  Weight weight;
  StateId to;
  auto operator<=>(const Transition&) const = default;
};

struct Edge {
  StateId to;
  Weight weight;
};

class Wfa {
 public:
  Wfa() = default;
  Wfa(std::vector<std::string> states, std::vector<std::string> alphabet, StateId initial,
      std::vector<Transition> transitions, std::vector<std::string>* warnings = nullptr);

  static Wfa from_json(const nlohmann::json& j, std::vector<std::string>* warnings = nullptr);
  static Wfa load(const std::string& path, std::vector<std::string>* warnings = nullptr);
  nlohmann::json to_json() const;

  int num_states() const { return static_cast<int>(states_.size()); }
  int num_letters() const { return static_cast<int>(alphabet_.size()); }
  StateId initial() const { return initial_; }
  const std::vector<std::string>& states() const { return states_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  const std::string& state_name(StateId s) const { return states_.at(s); }
  const std::string& letter_name(LetterId a) const { return alphabet_.at(a); }
  StateId state_id(const std::string& name) const;
  LetterId letter_id(const std::string& name) const;

  // finite transitions, sorted by (from, letter, to)
  const std::vector<Transition>& transitions() const { return trans_; }
  const std::vector<Edge>& out(StateId p, LetterId a) const { return out_[p * alphabet_.size() + a]; }
  Weight weight(StateId p, LetterId a, StateId q) const;

  // letters concatenated when all names are single characters, comma separated otherwise
  Word parse_word(const std::string& text) const;
  std::string format_word(const Word& w) const;
  void check_word(const Word& w) const;

 private:
  std::vector<std::string> states_;
  std::vector<std::string> alphabet_;
  StateId initial_ = 0;
  std::vector<Transition> trans_;
  std::vector<std::vector<Edge>> out_;
};

struct RunStep {
  StateId from;
  LetterId letter;
  Weight weight;
  StateId to;
  bool operator==(const RunStep&) const = default;
};

struct RunTrace {
  std::vector<RunStep> steps;
  Weight wt = Weight::zero();
  bool operator==(const RunTrace&) const = default;
};

using Configuration = std::vector<Weight>;

}  // namespace trop
