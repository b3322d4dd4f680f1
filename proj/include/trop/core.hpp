// core.hpp
#pragma once

#include <optional>
#include <set>

#include "trop/wfa.hpp"

namespace trop {

using StateSet = std::set<StateId>;

Configuration unit_config(const Wfa& a, StateId q);
StateSet support(const Configuration& c);
Weight config_min(const Configuration& c);
// subtract the minimum; returns the shift (inf if empty support)
Weight normalize(Configuration& c);

Configuration xconf(const Wfa& a, const Configuration& start, const Word& w);
Weight eval(const Wfa& a, const Word& w);
Weight mwt(const Wfa& a, const StateSet& from, const Word& w, const StateSet& to);

// validates the trace against the automaton; throws on an invalid run
void check_run(const Wfa& a, const RunTrace& run);
bool is_seamless(const Wfa& a, const Configuration& start, const RunTrace& run);
// a minimal run from start on w ending in q (lowest ids on ties), if any
std::optional<RunTrace> min_run(const Wfa& a, const Configuration& start, const Word& w, StateId q);

Weight wmax(const Wfa& a, LetterId letter);
Weight wmax(const Wfa& a, const Word& w);
Weight maxeff(const Wfa& a, const Word& w);

struct GapWitness {
  Word x, y;
  StateId q;
  Weight gap;
};
std::optional<GapWitness> find_gap_witness(const Wfa& a, std::int64_t min_gap, int max_len);
bool verify_gap_witness(const Wfa& a, const GapWitness& g, std::int64_t min_gap);

Wfa trim(const Wfa& a);

}  // namespace trop
