// augmented.hpp
#pragma once

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <unordered_map>

#include "trop/core.hpp"

namespace trop {

using Mask = std::uint32_t;

struct AugState {
  int p = 0;   // inner
  int q = 0;   // baseline
  Mask T = 0;  // reachable set
  bool operator==(const AugState&) const = default;
  auto tie() const { return std::make_tuple(T, q, p); }
  bool operator<(const AugState& o) const { return tie() < o.tie(); }
};

using ALetter = int;
using AWord = std::vector<ALetter>;
using AugConfig = std::map<AugState, Weight>;  // finite entries only
using AugSet = std::set<AugState>;

enum class LetterKind { Base, Cactus, Rebase, Jump };

struct LetterDef {
  LetterKind kind = LetterKind::Base;
  int trans = -1;  // base: index into the automaton's transition list
  // cactus/rebase: the cycle's state set {(., q, T)}; jump: source baseline q
  int q = -1;
  Mask T = 0;
  AWord word;
  AugState s, r;  // rebase endpoints
  int q2 = -1;    // jump: target baseline
  // cactus/rebase transitions by inner state: (target inner, weight)
  std::vector<std::vector<std::pair<int, Weight>>> table;
  int depth = 0;
  Weight wmax = Weight::zero();
  bool degenerate = false;  // cactus only
};

struct AugStep {
  AugState from;
  ALetter letter;
  Weight weight;
  AugState to;
  bool operator==(const AugStep&) const = default;
};

struct AugRun {
  std::vector<AugStep> steps;
  Weight wt = Weight::zero();
  bool operator==(const AugRun&) const = default;
};

class AugWfa {
 public:
  explicit AugWfa(Wfa a);
  AugWfa(const AugWfa&) = delete;
  AugWfa& operator=(const AugWfa&) = delete;

  const Wfa& base() const { return a_; }
  AugState initial() const;
  Mask post(Mask T, LetterId sigma) const;
  Mask full_mask() const { return (Mask(1) << a_.num_states()) - 1; }

  int num_base_letters() const { return static_cast<int>(a_.transitions().size()); }
  ALetter base_letter(StateId from, LetterId sigma, StateId to) const;
  int num_letters() const;
  const LetterDef& letter(ALetter id) const;

  // structural interning; returns the existing id for an equal letter
  ALetter intern(LetterDef def);
  std::optional<ALetter> find(const LetterDef& def) const;
  ALetter jump_letter(const AugState& from, const AugState& to);

  // finite outgoing transitions, sorted by target
  const std::vector<std::pair<AugState, Weight>>& step(const AugState& s, ALetter l) const;
  Weight trans_weight(const AugState& s, ALetter l, const AugState& t) const;

  std::string state_str(const AugState& s) const;
  std::string letter_str(ALetter l) const;
  std::string word_str(const AWord& w) const;

 private:
  using Key = std::tuple<int, int, int, Mask, AWord, int, int, Mask, int, int, Mask, int>;
  static Key key_of(const LetterDef& d);

  Wfa a_;
  mutable std::mutex mu_;
  std::deque<LetterDef> letters_;
  std::map<Key, ALetter> index_;
  mutable std::unordered_map<std::uint64_t, std::unique_ptr<std::vector<std::pair<AugState, Weight>>>> memo_;
};

std::string mask_str(const Wfa& a, Mask T);
int popcount(Mask T);
std::vector<int> mask_members(Mask T);

AugConfig aug_unit(const AugState& s);
AugConfig aug_step(const AugWfa& aug, const AugConfig& c, ALetter l);
AugConfig aug_xconf(const AugWfa& aug, const AugConfig& c, const AWord& w);
Weight aug_min(const AugConfig& c);
AugSet aug_support(const AugConfig& c);
Weight aug_mwt(const AugWfa& aug, const AugSet& from, const AWord& w, const AugSet& to);
AugSet reach(const AugWfa& aug, const AugSet& from, const AWord& w);
// ghost-reachable states: every inner state of the shared (baseline, reachable set)
AugSet ghost(const AugWfa& aug, const AugSet& reached);
AugSet ghost_reach(const AugWfa& aug, const AugState& s, const AWord& w);
AugSet saturated(const AugWfa& aug, int q, Mask T);

void check_aug_run(const AugWfa& aug, const AugRun& run);
bool aug_is_seamless(const AugWfa& aug, const AugConfig& start, const AugRun& run);
std::optional<AugRun> aug_min_run(const AugWfa& aug, const AugConfig& start, const AWord& w, const AugState& target);

// baseline component along the word from the given state; nullopt once the component is undefined
std::optional<std::vector<std::pair<int, Mask>>> baseline_track(const AugWfa& aug, const AugState& s, const AWord& w);
// the run through baseline states from s (a baseline state); nullopt if it does not exist
std::optional<AugRun> baseline_run(const AugWfa& aug, const AugState& s, const AWord& w);
bool jump_free(const AugWfa& aug, const AWord& w);

Weight aug_wmax(const AugWfa& aug, const AWord& w);
Weight aug_maxeff(const AugWfa& aug, const AWord& w);
int depth(const AugWfa& aug, const AWord& w);

AWord encode_run(const AugWfa& aug, const RunTrace& run);
AWord concat(AWord a, const AWord& b);
AWord power(const AWord& w, std::int64_t k);
AugRun run_power(const AugRun& r, std::int64_t k);

AugState shift_state(const AugState& s, const AugState& anchor);
AugSet shift_set(const AugSet& s, const AugState& anchor);
AugConfig shift_config(const AugConfig& c, const AugState& anchor);
// rebase letter of a cactus for the transition (from, q, T) -> (to, q, T); the cactus itself when both are the baseline
ALetter make_rebase(AugWfa& aug, ALetter cactus, int from, int to);

AWord shift_word(AugWfa& aug, const AWord& w, const AugRun& anchor);
AugRun shift_run(AugWfa& aug, const AugRun& run, const AugRun& anchor);

}  // namespace trop
