// sri.hpp
#pragma once

#include "trop/analysis.hpp"

namespace trop {

enum class SriKind { Simple, General };

struct SriParams {
  std::function<std::int64_t(int)> length_fn;
  SriKind kind = SriKind::Simple;
  Weight H = 0;            // added to the gap for the general kind
  std::int64_t m = 0;      // 0: the tight constant of the cycle (ghost(u), x)
  std::int64_t S = 0;      // 0: the size of the full augmented state space
  int max_depth = 3;
  DominanceParams dom;
};

struct SriDecomposition {
  AWord u, x, y, v;
  std::vector<AugSet> partition;  // V_1 .. V_l, lowest first
  std::vector<std::int64_t> kx, ky;
  Weight gap;
  std::int64_t m = 0;
  SriKind kind = SriKind::Simple;
};

struct SriCheck {
  std::optional<SriDecomposition> sri;
  std::string diagnostic;
};

// throws alphabet-mismatch when a letter is outside the bounded alphabet
SriCheck check_sri(const AugWfa& aug, const AWord& u, const AWord& x, const AWord& y, const AWord& v,
                   const SriParams& params);

struct Flavour {
  bool negative = false;
  bool positive = false;
  bool stable = false;
  std::optional<bool> degenerate;  // set for stable SRI
};
CycleCandidate sri_cycle(const AugWfa& aug, const SriDecomposition& sri);
Flavour classify(const AugWfa& aug, const SriDecomposition& sri);

// u y v for a stable degenerate SRI, after re-verifying c_u = c_ux and the phi and psi equalities
AWord degenerate_shorten(const AugWfa& aug, const SriDecomposition& sri, const DominanceParams& dom);

struct BudReport {
  AWord word;
  ALetter letter = -1;
  bool superior = false;   // mwt over w <= mwt over w' for every state
  bool charge_ok = false;  // psi(w) >= psi(w')
  bool potential_ok = false;
  Weight phi_w, phi_w2, psi_w, psi_w2;
  std::optional<WitnessVerdict> witness;  // checked when the potential inequality fails
};
BudReport bud(AugWfa& aug, const SriDecomposition& sri, const DominanceParams& dom, const WitnessAlphabets& alph);

struct KillReport {
  ALetter letter = -1;
  StableShift shift;
  int ell_prime = 0;
  std::vector<AugState> survivors;  // shifted states of V_1..V_l' with a finite transition on the letter
  bool ok() const { return survivors.empty(); }
};
// ell_prime < 0: the longest prefix of parts with non-negative shift
KillReport shift_kill_positive(AugWfa& aug, const SriDecomposition& sri, int ell_prime = -1);

nlohmann::json sri_to_json(const AugWfa& aug, const SriDecomposition& sri);

}  // namespace trop
