// determinise.hpp
#pragma once

#include "trop/core.hpp"

namespace trop {

// sorted (state, offset) pairs with minimum offset 0
using DetConfig = std::vector<std::pair<StateId, std::int64_t>>;

struct DetMove {
  int to = -1;  // -1: every tracked run died
  Weight out = Weight::inf();
};

struct DetWfa {
  std::int64_t B = 0;
  std::vector<std::string> alphabet;
  std::vector<DetConfig> configs;  // configs[0] = {q0: 0}
  std::vector<DetMove> moves;      // moves[c * |alphabet| + a]

  int num_letters() const { return static_cast<int>(alphabet.size()); }
  const DetMove& move(int c, LetterId a) const { return moves[c * alphabet.size() + a]; }
  Weight eval(const Word& w) const;
  std::string config_name(int c, const Wfa& source) const;
  // a Wfa with one state per configuration; every state is final
  Wfa to_wfa(const Wfa& source) const;
};

std::string canonical_name(const DetConfig& c, const Wfa& source);

// errors: state-budget-exceeded
DetWfa build_restriction(const Wfa& a, std::int64_t B, std::size_t max_configs = 200000);

struct EquivalenceVerdict {
  bool equivalent = true;
  std::optional<Word> counterexample;
  Weight a_value = Weight::inf();
  Weight det_value = Weight::inf();
};

// decides A|_B(w) <= A(w) for all w; errors: search-budget-exceeded, weight overflow
EquivalenceVerdict check_equiv(const Wfa& a, const DetWfa& det, std::size_t max_frontier = 2000000);

// a split w = x y with a gap above min_gap at x, if any
std::optional<GapWitness> gap_witness_on(const Wfa& a, const Word& w, std::int64_t min_gap);

struct DeterminiseReport {
  std::int64_t B = 0;
  bool determinisable = false;
  EquivalenceVerdict verdict;
  std::size_t det_states = 0;
  std::optional<Wfa> automaton;  // the deterministic equivalent when determinisable
};

DeterminiseReport decide_at_gap(const Wfa& a, std::int64_t B, std::size_t max_configs = 200000);

nlohmann::json verdict_to_json(const Wfa& a, const EquivalenceVerdict& v);
nlohmann::json report_to_json(const Wfa& a, const DeterminiseReport& r);

}  // namespace trop
