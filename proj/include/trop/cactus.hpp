// cactus.hpp
#pragma once

#include <functional>

#include <gmpxx.h>

#include "trop/augmented.hpp"

namespace trop {

using Mat = std::vector<std::vector<Weight>>;

Mat mat_identity(int n);
Mat mat_mul(const Mat& a, const Mat& b);
Mat mat_pow(const Mat& a, std::int64_t e);

// how the stabilisation constant is chosen: from the cycle's own state set, or from the whole of S
enum class MMode { Tight, Declared };

mpz_class stabilisation_constant(std::int64_t n);
// |S| for the augmented construction of an automaton with n states
mpz_class declared_size(int n);

struct CycleCandidate {
  int q = 0;   // baseline
  Mask T = 0;  // reachable set; S' = {(p, q, T) | p in T}
  AWord word;
  bool operator==(const CycleCandidate&) const = default;
};

struct CycleInfo {
  std::vector<int> members;  // inner states in T, ascending
  Mat M;                     // M[i][j] = mwt((members[i],q,T) -w-> (members[j],q,T))
  bool reflexive = false;
  bool proper = false;
  int index_of(int p) const;
  AugState state(const CycleCandidate& c, int i) const { return {members[i], c.q, c.T}; }
};

CycleInfo analyse_cycle(const AugWfa& aug, const CycleCandidate& cand);
std::int64_t cycle_m(const AugWfa& aug, const CycleCandidate& cand, MMode mode = MMode::Tight);

AugSet ref_states(const AugWfa& aug, const CycleCandidate& cand);
AugSet min_states(const AugWfa& aug, const CycleCandidate& cand);
bool is_stable_cycle(const AugWfa& aug, const CycleCandidate& cand);

struct Slope {
  AugRun run;
  int k = 1;
  std::int64_t num = 0;  // slope = num / k
  bool operator<(const Slope& o) const;
};
Slope min_slope_cycle(const AugWfa& aug, const CycleCandidate& cand);

struct StableShift {
  CycleCandidate cycle;
  AugRun anchor;  // run on w^k the cycle was shifted onto
  int k = 1;
};
StableShift shift_to_stable(AugWfa& aug, const CycleCandidate& cand);

struct GroundedPair {
  AugState s, r, g;
  Weight weight;
};
struct GroundedPairs {
  std::int64_t m = 0;
  AugSet min_states;
  std::vector<GroundedPair> pairs;
  const GroundedPair* find(const AugState& s, const AugState& r) const;
};
GroundedPairs grounded_pairs(const AugWfa& aug, const CycleCandidate& cand, MMode mode = MMode::Tight);
bool is_degenerate(const AugWfa& aug, const CycleCandidate& cand, MMode mode = MMode::Tight);

ALetter stabilise(AugWfa& aug, const CycleCandidate& cand, MMode mode = MMode::Tight);
ALetter rebase(AugWfa& aug, ALetter cactus, const AugState& s, const AugState& r);
CycleCandidate cycle_of(const AugWfa& aug, ALetter cactus);

// first degenerate letter met while walking the cactus chains below the letter
std::optional<ALetter> cactus_chain_check(const AugWfa& aug, ALetter l);

struct PumpingBound {
  std::int64_t m = 0;
  std::int64_t M0 = 0;
  std::int64_t checked_up_to = 0;  // the clauses were verified for every k in [M0, checked_up_to]
};
// smallest M0 such that over w^{2m k}, k >= M0, non-grounded pairs exceed n and grounded pairs take the letter's weight
PumpingBound find_M0(const AugWfa& aug, ALetter cactus, std::int64_t n, std::int64_t cap = 1 << 16);

struct Unfolding {
  AWord word;
  std::int64_t M0 = 0;
  std::int64_t reps = 0;  // 2 m M0
};
Unfolding unfold(AugWfa& aug, const AWord& prefix, ALetter cactus, const AWord& suffix, std::int64_t F,
                 std::int64_t cap = 1 << 16);
// the contract of the unfolding lemma at every prefix of the suffix
bool check_unfold_contract(const AugWfa& aug, const AWord& prefix, ALetter cactus, const AWord& suffix,
                           const Unfolding& u, std::int64_t F, std::string* why = nullptr);

AWord flatten(AugWfa& aug, const AWord& word, std::int64_t F);
bool check_flatten_contract(const AugWfa& aug, const AWord& word, const AWord& flat, std::int64_t F,
                            std::string* why = nullptr);

bool validate_bounded_letter(const AugWfa& aug, ALetter l, const std::function<std::int64_t(int)>& length_fn,
                             int max_depth);

nlohmann::json letter_to_json(const AugWfa& aug, ALetter l);
ALetter letter_from_json(AugWfa& aug, const nlohmann::json& j);
nlohmann::json word_to_json(const AugWfa& aug, const AWord& w);
AWord word_from_json(AugWfa& aug, const nlohmann::json& j);

}  // namespace trop
