// sri.cpp
#include "trop/sri.hpp"

#include <algorithm>

namespace trop {

namespace {

AugConfig conf(const AugWfa& aug, const AWord& w) { return aug_xconf(aug, aug_unit(aug.initial()), w); }

int sign(std::int64_t v) { return (v > 0) - (v < 0); }

CycleCandidate cycle_after(const AugWfa& aug, const AWord& u, const AWord& x) {
  AugState b = *ghost_reach(aug, aug.initial(), u).begin();
  return {b.q, b.T, x};
}

}  // namespace

CycleCandidate sri_cycle(const AugWfa& aug, const SriDecomposition& sri) { return cycle_after(aug, sri.u, sri.x); }

SriCheck check_sri(const AugWfa& aug, const AWord& u, const AWord& x, const AWord& y, const AWord& v,
                   const SriParams& params) {
  const auto& L = params.length_fn;
  for (const AWord* part : {&u, &x, &y, &v})
    for (auto l : *part)
      if (!in_class(aug, l, LetterClass::Cac, L, params.max_depth))
        throw Error("alphabet-mismatch: " + aug.letter_str(l) + " is not a bounded cactus letter");
  auto fail = [](std::string d) { return SriCheck{std::nullopt, std::move(d)}; };
  if (x.empty() || y.empty()) return fail("x and y must be non-empty");
  AWord ux = concat(u, x), uxy = concat(ux, y);
  AugConfig cu = conf(aug, u), cux = conf(aug, ux), cuxy = conf(aug, uxy);
  if (cu.empty()) return fail("u is not readable");
  if (aug_support(cu) != aug_support(cux) || aug_support(cu) != aug_support(cuxy))
    return fail("supports after u, ux and uxy differ");

  SriDecomposition d{u, x, y, v, {}, {}, {}, Weight::zero(), 0, params.kind};
  CycleCandidate cyc = cycle_after(aug, u, x);
  d.m = params.m > 0 ? params.m : cycle_m(aug, cyc);
  if (static_cast<double>(x.size()) * static_cast<double>(d.m) > static_cast<double>(L(depth(aug, x) + 1)))
    return fail("x is longer than L(dep(x)+1)/m");
  std::int64_t S = params.S;
  if (S <= 0) {
    mpz_class s = declared_size(aug.base().num_states());
    if (!s.fits_slong_p()) throw Error("overflow: state count");
    S = s.get_si();
  }
  d.gap = wmul(wmul(wmul(aug_maxeff(aug, concat(x, y)), 4), S), d.m);
  if (params.kind == SriKind::General) d.gap += params.H;

  // cut wherever the sorted u-configuration jumps by more than G, then drop cuts that fail at ux or uxy
  std::vector<std::pair<Weight, AugState>> order;
  for (const auto& [s, w] : cu) order.push_back({w, s});
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::size_t> cuts;
  for (std::size_t i = 1; i < order.size(); ++i)
    if (order[i].first - order[i - 1].first > d.gap) cuts.push_back(i);
  auto separated = [&](const AugConfig& c, std::size_t lo, std::size_t cut, std::size_t hi) {
    Weight top = Weight(std::numeric_limits<std::int64_t>::min() / 2), bottom = Weight::inf();
    for (std::size_t i = lo; i < cut; ++i) top = std::max(top, c.at(order[i].second));
    for (std::size_t i = cut; i < hi; ++i) bottom = wmin(bottom, c.at(order[i].second));
    return bottom - top > d.gap;
  };
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::size_t> bounds{0};
    bounds.insert(bounds.end(), cuts.begin(), cuts.end());
    bounds.push_back(order.size());
    for (std::size_t c = 0; c < cuts.size(); ++c)
      if (!separated(cux, bounds[c], cuts[c], bounds[c + 2]) || !separated(cuxy, bounds[c], cuts[c], bounds[c + 2])) {
        cuts.erase(cuts.begin() + c);
        changed = true;
        break;
      }
  }
  std::vector<std::size_t> bounds{0};
  bounds.insert(bounds.end(), cuts.begin(), cuts.end());
  bounds.push_back(order.size());
  for (std::size_t p = 0; p + 1 < bounds.size(); ++p) {
    AugSet part;
    std::optional<std::int64_t> kx, ky;
    for (std::size_t i = bounds[p]; i < bounds[p + 1]; ++i) {
      const AugState& s = order[i].second;
      part.insert(s);
      std::int64_t a = (cux.at(s) - cu.at(s)).value(), b = (cuxy.at(s) - cux.at(s)).value();
      if ((kx && *kx != a) || (ky && *ky != b))
        return fail("part " + std::to_string(p + 1) + " is not shifted by a constant");
      kx = a;
      ky = b;
    }
    if (sign(*kx) != sign(*ky)) return fail("part " + std::to_string(p + 1) + " changes sign between x and y");
    d.partition.push_back(std::move(part));
    d.kx.push_back(*kx);
    d.ky.push_back(*ky);
  }
  AWord w = concat(uxy, v);
  auto base = baseline_run(aug, aug.initial(), w);
  if (!base || !aug_is_seamless(aug, aug_unit(aug.initial()), *base)) return fail("no seamless baseline run");
  if (params.kind == SriKind::Simple) {
    Weight a = potential(aug, u, params.dom).phi, b = potential(aug, ux, params.dom).phi,
           c = potential(aug, uxy, params.dom).phi;
    if (!(a <= b && b <= c)) return fail("potential is not monotone over u, ux, uxy");
    if ((a == b) != (b == c)) return fail("potential equalities do not match");
  } else {
    Weight a = charge_of(cu).psi, b = charge_of(cux).psi, c = charge_of(cuxy).psi;
    if (!(a >= b && b >= c)) return fail("charge is not monotone over u, ux, uxy");
    if ((a == b) != (b == c)) return fail("charge equalities do not match");
  }
  return {d, "sri"};
}

Flavour classify(const AugWfa& aug, const SriDecomposition& sri) {
  Flavour f;
  f.negative = std::any_of(sri.kx.begin(), sri.kx.end(), [](auto k) { return k < 0; });
  f.positive = !f.negative;
  CycleCandidate c = sri_cycle(aug, sri);
  f.stable = is_stable_cycle(aug, c);
  if (f.stable) f.degenerate = is_degenerate(aug, c);
  return f;
}

AWord degenerate_shorten(const AugWfa& aug, const SriDecomposition& sri, const DominanceParams& dom) {
  Flavour f = classify(aug, sri);
  if (!f.stable || !f.degenerate.value_or(false)) throw Error("not-degenerate: the SRI is not stable and degenerate");
  if (conf(aug, sri.u) != conf(aug, concat(sri.u, sri.x)))
    throw std::logic_error("degenerate SRI does not repeat the configuration");
  AWord full = concat(concat(concat(sri.u, sri.x), sri.y), sri.v);
  AWord shorter = concat(concat(sri.u, sri.y), sri.v);
  if (charge(aug, full).psi != charge(aug, shorter).psi) throw std::logic_error("charge changed by shortening");
  if (potential(aug, full, dom).phi != potential(aug, shorter, dom).phi)
    throw std::logic_error("potential changed by shortening");
  return shorter;
}

BudReport bud(AugWfa& aug, const SriDecomposition& sri, const DominanceParams& dom, const WitnessAlphabets& alph) {
  Flavour f = classify(aug, sri);
  if (!f.stable || f.degenerate.value_or(true))
    throw Error("not-stable-nondegenerate: budding needs a stable non-degenerate SRI");
  BudReport r;
  r.letter = stabilise(aug, sri_cycle(aug, sri));
  AWord w = concat(concat(concat(sri.u, sri.x), sri.y), sri.v);
  r.word = concat(concat(sri.u, {r.letter}), sri.v);
  AugConfig c = conf(aug, w), c2 = conf(aug, r.word);
  r.superior = std::all_of(c2.begin(), c2.end(), [&](const auto& e) {
    auto it = c.find(e.first);
    return it != c.end() && it->second <= e.second;
  });
  r.psi_w = charge(aug, w).psi;
  r.psi_w2 = charge(aug, r.word).psi;
  r.charge_ok = r.psi_w >= r.psi_w2;
  auto pw = potential(aug, w, dom);
  r.phi_w = pw.phi;
  r.phi_w2 = potential(aug, r.word, dom).phi;
  r.potential_ok = r.phi_w <= r.phi_w2;
  if (!r.potential_ok) r.witness = check_witness(aug, sri.u, r.letter, concat(sri.v, pw.suffix), 0, alph);
  return r;
}

KillReport shift_kill_positive(AugWfa& aug, const SriDecomposition& sri, int ell_prime) {
  int l = static_cast<int>(sri.partition.size());
  if (ell_prime < 0) {
    ell_prime = 0;
    while (ell_prime < l && sri.kx[ell_prime] >= 0) ++ell_prime;
  }
  if (ell_prime > l) throw Error("ell_prime exceeds the number of parts");
  for (int j = 0; j < ell_prime; ++j)
    if (sri.kx[j] < 0) throw Error("positivity-violated: part " + std::to_string(j + 1) + " has a negative shift");
  CycleCandidate c = sri_cycle(aug, sri);
  if (min_slope_cycle(aug, c).num >= 0) throw Error("no-negative-cycle: the cycle has no negative run");
  KillReport r;
  r.ell_prime = ell_prime;
  r.shift = shift_to_stable(aug, c);
  r.letter = stabilise(aug, r.shift.cycle);
  AugState anchor = r.shift.anchor.steps.front().from;
  for (int j = 0; j < ell_prime; ++j)
    for (const auto& s : sri.partition[j]) {
      AugState t = shift_state(s, anchor);
      if (!aug.step(t, r.letter).empty()) r.survivors.push_back(t);
    }
  return r;
}

nlohmann::json sri_to_json(const AugWfa& aug, const SriDecomposition& sri) {
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& p : sri.partition) {
    nlohmann::json ss = nlohmann::json::array();
    for (const auto& s : p) ss.push_back(aug.state_str(s));
    parts.push_back(ss);
  }
  return {{"u", word_to_json(aug, sri.u)},
          {"x", word_to_json(aug, sri.x)},
          {"y", word_to_json(aug, sri.y)},
          {"v", word_to_json(aug, sri.v)},
          {"partition", parts},
          {"kx", sri.kx},
          {"ky", sri.ky},
          {"gap", sri.gap.value()},
          {"m", sri.m},
          {"kind", sri.kind == SriKind::Simple ? "simple" : "general"}};
}

}  // namespace trop
