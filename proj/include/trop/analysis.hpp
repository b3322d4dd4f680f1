// analysis.hpp
#pragma once

#include "trop/cactus.hpp"

namespace trop {

struct DominanceParams {
  int horizon = 3;
  AWord alphabet;  // empty: every base letter of the automaton
};

struct PotentialReport {
  Weight phi;
  AugState dominant;
  AWord suffix;
  DominanceParams params;
};

struct ChargeReport {
  Weight psi;
  AugState argmin;
};

// the seamless baseline run of a jump-free word; throws otherwise
AugRun seamless_baseline(const AugWfa& aug, const AWord& w);

ChargeReport charge_of(const AugConfig& c);
ChargeReport charge(const AugWfa& aug, const AWord& w);

// whether s is dominant in c with the given suffix
bool separates(const AugWfa& aug, const AugConfig& c, const AugState& s, const AWord& suffix);
// shortest, then lexicographically least, separating suffix within the horizon
std::optional<AWord> dominance_suffix(const AugWfa& aug, const AugConfig& c, const AugState& s,
                                      const DominanceParams& params);
PotentialReport potential_of(const AugWfa& aug, const AugConfig& c, const DominanceParams& params);
PotentialReport potential(const AugWfa& aug, const AWord& w, const DominanceParams& params);
nlohmann::json potential_json(const AugWfa& aug, const PotentialReport& r);

struct GrowthFinding {
  AWord word;
  ALetter letter;
  Weight before, after, bound;
};
struct GrowthReport {
  int checked = 0;
  std::vector<GrowthFinding> findings;
};
// phi(w sigma) - phi(w) <= 2 maxeff(sigma) on every sampled word and letter with a seamless baseline run
GrowthReport bounded_growth_check(const AugWfa& aug, const AWord& alphabet, const std::vector<AWord>& samples,
                                  const DominanceParams& params);

struct HighPotential {
  AWord word;
  PotentialReport report;  // certified dominant state and its separating suffix
  AWord flat;              // the flattened prefix before the shift
  AugRun anchor;
};
HighPotential construct_high_potential(AugWfa& aug, const AWord& u, ALetter sigma, std::int64_t P);

struct MonotonicityReport {
  bool seamless = false;
  bool phi_ok = false;
  bool psi_ok = false;
  Weight phi_c, phi_d, psi_c, psi_d;
  bool ok() const { return seamless && phi_ok && psi_ok; }
};
MonotonicityReport monotonicity_check(const AugWfa& aug, const AugConfig& c, const AugConfig& d, const AWord& w,
                                      const DominanceParams& params);

// the bounded letter classes
enum class LetterClass { Cac, CacReb, CacRebCac, CacRebJump };
bool in_class(const AugWfa& aug, ALetter l, LetterClass cls, const std::function<std::int64_t(int)>& length_fn,
              int max_depth);

struct WitnessAlphabets {
  std::function<std::int64_t(int)> simple, general;
  int max_depth = 3;
};
struct WitnessVerdict {
  bool pass = false;
  int clause = 0;  // first failing clause
  std::string message;
};
WitnessVerdict check_witness(const AugWfa& aug, const AWord& w1, ALetter cactus, const AWord& w3, int type,
                             const WitnessAlphabets& alph);

}  // namespace trop
