// cactus.cpp
#include "trop/cactus.hpp"

#include <algorithm>

namespace trop {

Mat mat_identity(int n) {
  Mat m(n, std::vector<Weight>(n, Weight::inf()));
  for (int i = 0; i < n; ++i) m[i][i] = Weight::zero();
  return m;
}

Mat mat_mul(const Mat& a, const Mat& b) {
  std::size_t n = a.size();
  Mat c(n, std::vector<Weight>(n, Weight::inf()));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (!a[i][k].finite()) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (b[k][j].finite()) c[i][j] = wmin(c[i][j], a[i][k] + b[k][j]);
    }
  return c;
}

Mat mat_pow(const Mat& a, std::int64_t e) {
  Mat r = mat_identity(static_cast<int>(a.size())), base = a;
  while (e > 0) {
    if (e & 1) r = mat_mul(r, base);
    e >>= 1;
    if (e) base = mat_mul(base, base);
  }
  return r;
}

mpz_class stabilisation_constant(std::int64_t n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
  return f * n;
}

mpz_class declared_size(int n) {
  mpz_class total = 0;
  for (int j = 1; j <= n; ++j) {
    mpz_class c;
    mpz_bin_uiui(c.get_mpz_t(), n, j);
    total += c * j * j;
  }
  return total;
}

int CycleInfo::index_of(int p) const {
  auto it = std::lower_bound(members.begin(), members.end(), p);
  if (it == members.end() || *it != p) throw Error("state outside the cycle");
  return static_cast<int>(it - members.begin());
}

CycleInfo analyse_cycle(const AugWfa& aug, const CycleCandidate& cand) {
  if (cand.word.empty()) throw Error("cycle word is empty");
  if (!(cand.T >> cand.q & 1)) throw Error("baseline outside the reachable set");
  CycleInfo info;
  info.members = mask_members(cand.T);
  int k = static_cast<int>(info.members.size());
  info.M.assign(k, std::vector<Weight>(k, Weight::inf()));
  info.reflexive = true;
  for (int i = 0; i < k; ++i) {
    auto c = aug_xconf(aug, aug_unit(info.state(cand, i)), cand.word);
    for (const auto& [s, v] : c) {
      if (s.q != cand.q || s.T != cand.T) {
        info.reflexive = false;
        continue;
      }
      info.M[i][info.index_of(s.p)] = v;
    }
  }
  int b = info.index_of(cand.q);
  info.proper = info.reflexive && info.M[b][b].finite();
  return info;
}

static std::int64_t to_int64(const mpz_class& v, const char* what) {
  if (!v.fits_slong_p()) throw Error(std::string("overflow: ") + what + " does not fit in 64 bits");
  return v.get_si();
}

std::int64_t cycle_m(const AugWfa& aug, const CycleCandidate& cand, MMode mode) {
  if (mode == MMode::Tight) return to_int64(stabilisation_constant(popcount(cand.T)), "stabilisation constant");
  mpz_class n = declared_size(aug.base().num_states());
  if (n > 20) throw Error("overflow: declared stabilisation constant does not fit in 64 bits");
  return to_int64(stabilisation_constant(n.get_si()), "stabilisation constant");
}

static void require_proper(const CycleInfo& info) {
  if (!info.reflexive || !info.proper) throw Error("not-reflexive: not a proper reflexive cycle");
}

AugSet ref_states(const AugWfa& aug, const CycleCandidate& cand) {
  auto info = analyse_cycle(aug, cand);
  AugSet r;
  for (std::size_t i = 0; i < info.members.size(); ++i)
    if (info.M[i][i].finite()) r.insert(info.state(cand, static_cast<int>(i)));
  return r;
}

static AugSet minimal_diagonal(const CycleCandidate& cand, const CycleInfo& info, const Mat& M) {
  Weight best = Weight::inf();
  for (std::size_t i = 0; i < M.size(); ++i) best = wmin(best, M[i][i]);
  AugSet r;
  if (!best.finite()) return r;
  for (std::size_t i = 0; i < M.size(); ++i)
    if (M[i][i] == best) r.insert(info.state(cand, static_cast<int>(i)));
  return r;
}

AugSet min_states(const AugWfa& aug, const CycleCandidate& cand) {
  auto info = analyse_cycle(aug, cand);
  return minimal_diagonal(cand, info, info.M);
}

static bool stable(const CycleCandidate& cand, const CycleInfo& info) {
  // a negative closed walk contains a negative simple cycle, whose length is at most |S'|
  int b = info.index_of(cand.q);
  Mat P = info.M;
  for (std::size_t j = 1; j <= info.members.size(); ++j) {
    for (std::size_t i = 0; i < P.size(); ++i)
      if (P[i][i] < Weight::zero()) return false;
    if (P[b][b] != Weight::zero()) return false;
    P = mat_mul(P, info.M);
  }
  return true;
}

bool is_stable_cycle(const AugWfa& aug, const CycleCandidate& cand) {
  auto info = analyse_cycle(aug, cand);
  require_proper(info);
  return stable(cand, info);
}

bool Slope::operator<(const Slope& o) const {
  __int128 a = static_cast<__int128>(num) * o.k, b = static_cast<__int128>(o.num) * k;
  if (a != b) return a < b;
  if (k != o.k) return k < o.k;
  return run.steps.front().from < o.run.steps.front().from;
}

Slope min_slope_cycle(const AugWfa& aug, const CycleCandidate& cand) {
  auto info = analyse_cycle(aug, cand);
  require_proper(info);
  int n = static_cast<int>(info.members.size());
  // minimise M^k[s][s]/k over k <= |S'|; ties to smaller k, then state order
  int best_k = 0, best_i = -1;
  std::int64_t best_num = 0;
  Mat P = info.M;
  for (int k = 1; k <= n; ++k) {
    for (int i = 0; i < n; ++i) {
      if (!P[i][i].finite()) continue;
      std::int64_t v = P[i][i].value();
      if (best_i < 0 || static_cast<__int128>(v) * best_k < static_cast<__int128>(best_num) * k) {
        best_k = k;
        best_i = i;
        best_num = v;
      }
    }
    P = mat_mul(P, info.M);
  }
  Slope s;
  s.k = best_k;
  s.num = best_num;
  AugState st = info.state(cand, best_i);
  auto run = aug_min_run(aug, aug_unit(st), power(cand.word, best_k), st);
  if (!run || run->wt != Weight(best_num)) throw std::logic_error("min-slope run extraction failed");
  s.run = *run;
  return s;
}

StableShift shift_to_stable(AugWfa& aug, const CycleCandidate& cand) {
  Slope s = min_slope_cycle(aug, cand);
  StableShift out;
  if (s.num >= 0) {
    out.cycle = cand;
    out.anchor = *baseline_run(aug, {cand.q, cand.q, cand.T}, cand.word);
    out.k = 1;
    return out;
  }
  AWord wk = power(cand.word, s.k);
  out.cycle = {s.run.steps.front().from.p, cand.T, shift_word(aug, wk, s.run)};
  out.anchor = s.run;
  out.k = s.k;
  if (!is_stable_cycle(aug, out.cycle)) throw std::logic_error("shifted cycle is not stable");
  return out;
}

const GroundedPair* GroundedPairs::find(const AugState& s, const AugState& r) const {
  for (const auto& p : pairs)
    if (p.s == s && p.r == r) return &p;
  return nullptr;
}

static GroundedPairs grounded(const CycleCandidate& cand, const CycleInfo& info, std::int64_t m, const Mat& Mm) {
  GroundedPairs gp;
  gp.m = m;
  gp.min_states = minimal_diagonal(cand, info, Mm);
  int n = static_cast<int>(info.members.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Weight best = Weight::inf();
      AugState g;
      for (const auto& x : gp.min_states) {
        int k = info.index_of(x.p);
        Weight v = Mm[i][k] + Mm[k][j];
        if (v < best) {
          best = v;
          g = x;
        }
      }
      if (best.finite()) gp.pairs.push_back({info.state(cand, i), info.state(cand, j), g, best});
    }
  return gp;
}

GroundedPairs grounded_pairs(const AugWfa& aug, const CycleCandidate& cand, MMode mode) {
  auto info = analyse_cycle(aug, cand);
  require_proper(info);
  if (!stable(cand, info)) throw Error("not-stable");
  std::int64_t m = cycle_m(aug, cand, mode);
  return grounded(cand, info, m, mat_pow(info.M, m));
}

static bool degenerate(const CycleCandidate& cand, const CycleInfo& info, const GroundedPairs& gp, const Mat& Mm) {
  // reachability over w^{2mk} equals reachability over w^m, and so do the reflexive states of w^{2m}
  int n = static_cast<int>(info.members.size());
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < n; ++t)
      if (Mm[t][t].finite() && Mm[i][t].finite() && !gp.find(info.state(cand, i), info.state(cand, t))) return false;
  return true;
}

bool is_degenerate(const AugWfa& aug, const CycleCandidate& cand, MMode mode) {
  auto info = analyse_cycle(aug, cand);
  require_proper(info);
  if (!stable(cand, info)) throw Error("not-stable");
  std::int64_t m = cycle_m(aug, cand, mode);
  Mat Mm = mat_pow(info.M, m);
  return degenerate(cand, info, grounded(cand, info, m, Mm), Mm);
}

ALetter stabilise(AugWfa& aug, const CycleCandidate& cand, MMode mode) {
  LetterDef d;
  d.kind = LetterKind::Cactus;
  d.q = cand.q;
  d.T = cand.T;
  d.word = cand.word;
  if (auto id = aug.find(d)) return *id;
  auto info = analyse_cycle(aug, cand);
  require_proper(info);
  if (!stable(cand, info)) throw Error("not-stable");
  std::int64_t m = cycle_m(aug, cand, mode);
  Mat Mm = mat_pow(info.M, m);
  GroundedPairs gp = grounded(cand, info, m, Mm);
  d.table.assign(aug.base().num_states(), {});
  Weight wm = Weight::zero();
  for (const auto& p : gp.pairs) {
    d.table[p.s.p].push_back({p.r.p, p.weight});
    wm = std::max(wm, wabs(p.weight));
  }
  d.depth = 1 + depth(aug, cand.word);
  d.wmax = wm;
  d.degenerate = degenerate(cand, info, gp, Mm);
  return aug.intern(std::move(d));
}

ALetter rebase(AugWfa& aug, ALetter cactus, const AugState& s, const AugState& r) {
  const LetterDef& d = aug.letter(cactus);
  if (d.kind != LetterKind::Cactus) throw Error("rebase of a non-cactus letter");
  if (s.q != d.q || r.q != d.q || s.T != d.T || r.T != d.T) throw Error("rebase endpoints outside the cycle");
  return make_rebase(aug, cactus, s.p, r.p);
}

CycleCandidate cycle_of(const AugWfa& aug, ALetter l) {
  const LetterDef& d = aug.letter(l);
  if (d.kind != LetterKind::Cactus && d.kind != LetterKind::Rebase) throw Error("not a cactus letter");
  return {d.q, d.T, d.word};
}

std::optional<ALetter> cactus_chain_check(const AugWfa& aug, ALetter l) {
  std::int64_t limit = declared_size(aug.base().num_states()).fits_slong_p()
                           ? declared_size(aug.base().num_states()).get_si()
                           : std::numeric_limits<std::int64_t>::max();
  std::function<std::optional<ALetter>(ALetter, std::int64_t)> walk = [&](ALetter x,
                                                                          std::int64_t len) -> std::optional<ALetter> {
    const LetterDef& d = aug.letter(x);
    if (d.kind != LetterKind::Cactus && d.kind != LetterKind::Rebase) return std::nullopt;
    if (d.kind == LetterKind::Cactus && d.degenerate) return x;
    if (len >= limit) throw std::logic_error("cactus chain of length |S| without a degenerate letter");
    for (auto y : d.word)
      if (auto r = walk(y, len + 1)) return r;
    return std::nullopt;
  };
  return walk(l, 1);
}

namespace {

Mat letter_matrix(const LetterDef& d, const CycleInfo& info) {
  int n = static_cast<int>(info.members.size());
  Mat A(n, std::vector<Weight>(n, Weight::inf()));
  for (int i = 0; i < n; ++i)
    for (auto [p2, w] : d.table[info.members[i]]) A[i][info.index_of(p2)] = w;
  return A;
}

}  // namespace

PumpingBound find_M0(const AugWfa& aug, ALetter cactus, std::int64_t n, std::int64_t cap) {
  const LetterDef& d = aug.letter(cactus);
  if (d.kind != LetterKind::Cactus) throw Error("not a cactus letter");
  CycleCandidate cand{d.q, d.T, d.word};
  auto info = analyse_cycle(aug, cand);
  std::int64_t m = cycle_m(aug, cand);
  Mat Mm = mat_pow(info.M, m);
  Mat P = mat_mul(Mm, Mm);
  Mat alpha = letter_matrix(d, info);
  std::int64_t k = static_cast<std::int64_t>(info.members.size());
  // runs of non-grounded pairs meet no minimal state at block boundaries, so every block cycle gains at least 1
  std::int64_t emin = 0;
  for (const auto& row : Mm)
    for (auto v : row)
      if (v.finite()) emin = std::min(emin, v.value());
  std::int64_t K1 = 1;
  while (true) {
    std::int64_t blocks = 2 * K1;
    std::int64_t cycles = blocks >= k - 1 ? (blocks - (k - 1)) / k : 0;
    if (cycles + (k - 1) * emin > n) break;
    if (++K1 > cap) throw Error("M0-cap-exceeded");
  }
  std::int64_t Kmax = K1 + 2;
  std::vector<bool> ok{false};
  Mat Pk = mat_identity(static_cast<int>(k));
  while (true) {
    while (static_cast<std::int64_t>(ok.size()) <= Kmax) {
      Pk = mat_mul(Pk, P);
      bool good = true;
      for (std::size_t i = 0; i < Pk.size() && good; ++i)
        for (std::size_t j = 0; j < Pk.size() && good; ++j) {
          if (alpha[i][j].finite())
            good = Pk[i][j] == alpha[i][j];
          else
            good = Pk[i][j] > Weight(n);
        }
      ok.push_back(good);
    }
    std::int64_t k0 = Kmax + 1;
    while (k0 > 1 && ok[k0 - 1]) --k0;
    if (k0 <= Kmax - 2) return {m, k0, Kmax};
    if (Kmax > cap) throw Error("M0-cap-exceeded");
    Kmax *= 2;
  }
}

Unfolding unfold(AugWfa& aug, const AWord& prefix, ALetter cactus, const AWord& suffix, std::int64_t F,
                 std::int64_t cap) {
  const LetterDef& d = aug.letter(cactus);
  if (d.kind != LetterKind::Cactus) throw Error("not a cactus letter");
  AWord whole = concat(concat(prefix, {cactus}), suffix);
  if (!(Weight(F) > wmul(aug_maxeff(aug, whole), 2))) throw Error("F-too-small: F must exceed 2 maxeff");
  auto pb = find_M0(aug, cactus, F, cap);
  Unfolding u;
  u.M0 = pb.M0;
  u.reps = 2 * pb.m * pb.M0;
  u.word = concat(concat(prefix, power(d.word, u.reps)), suffix);
  std::string why;
  if (!check_unfold_contract(aug, prefix, cactus, suffix, u, F, &why))
    throw std::logic_error("unfolding contract violated: " + why);
  return u;
}

bool check_unfold_contract(const AugWfa& aug, const AWord& prefix, ALetter cactus, const AWord& suffix,
                           const Unfolding& u, std::int64_t F, std::string* why) {
  AWord whole = concat(concat(prefix, {cactus}), suffix);
  Weight bound = Weight(F) - aug_maxeff(aug, whole);
  AugConfig c1 = aug_xconf(aug, aug_unit(aug.initial()), concat(prefix, {cactus}));
  AugConfig c2 = aug_xconf(aug, aug_unit(aug.initial()), AWord(u.word.begin(), u.word.end() - suffix.size()));
  for (std::size_t i = 0;; ++i) {
    for (const auto& [s, v] : c1) {
      auto it = c2.find(s);
      if (it == c2.end() || it->second != v) {
        if (why) *why = "old support not preserved after suffix prefix of length " + std::to_string(i);
        return false;
      }
    }
    for (const auto& [s, v] : c2)
      if (!c1.count(s) && !(v > bound)) {
        if (why) *why = "new state " + aug.state_str(s) + " too low after suffix prefix of length " + std::to_string(i);
        return false;
      }
    if (i == suffix.size()) break;
    c1 = aug_step(aug, c1, suffix[i]);
    c2 = aug_step(aug, c2, suffix[i]);
  }
  return true;
}

bool check_flatten_contract(const AugWfa& aug, const AWord& word, const AWord& flat, std::int64_t F, std::string* why) {
  AugConfig c = aug_xconf(aug, aug_unit(aug.initial()), word);
  AugConfig d = aug_xconf(aug, aug_unit(aug.initial()), flat);
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (c.empty()) return fail("the word is not readable");
  Weight top = Weight(std::numeric_limits<std::int64_t>::min() / 2);
  for (const auto& [s, v] : c) {
    top = std::max(top, v);
    auto it = d.find(s);
    if (it == d.end() || it->second != v) return fail("old support not preserved at " + aug.state_str(s));
  }
  for (const auto& [s, v] : d)
    if (!c.count(s) && v < top + Weight(F)) return fail("new state " + aug.state_str(s) + " below max + F");
  if (aug_support(d) != ghost(aug, aug_support(c))) return fail("flat support differs from the ghost set");
  return true;
}

AWord flatten(AugWfa& aug, const AWord& word, std::int64_t F) {
  for (auto l : word) {
    auto k = aug.letter(l).kind;
    if (k == LetterKind::Rebase) throw Error("rebase-present: flattening rebase letters is not supported");
    if (k == LetterKind::Jump) throw Error("jump letters cannot be flattened");
  }
  Weight me = aug_maxeff(aug, word);
  if (!(Weight(F) > wmul(me, 2))) throw Error("F-too-small: F must exceed 2 maxeff");
  constexpr std::size_t kMaxLen = 20'000'000;
  // one threshold for every nested unfolding; raised until the contract holds
  std::int64_t n = (Weight(F) + wmul(me, 4) + Weight(1)).value();
  for (int attempt = 0; attempt < 8; ++attempt, n *= 2) {
    std::map<ALetter, AWord> memo;
    std::function<const AWord&(ALetter)> flat = [&](ALetter l) -> const AWord& {
      auto it = memo.find(l);
      if (it != memo.end()) return it->second;
      const LetterDef& d = aug.letter(l);
      AWord out;
      if (d.kind == LetterKind::Base) {
        out = {l};
      } else if (d.kind == LetterKind::Cactus) {
        AWord inner;
        for (auto x : d.word) {
          const AWord& fx = flat(x);
          inner.insert(inner.end(), fx.begin(), fx.end());
        }
        auto pb = find_M0(aug, l, n);
        std::int64_t reps = 2 * pb.m * pb.M0;
        if (static_cast<double>(reps) * static_cast<double>(inner.size()) > kMaxLen)
          throw Error("flattened word too long");
        out = power(inner, reps);
      } else {
        throw Error("rebase-present: flattening rebase letters is not supported");
      }
      return memo.emplace(l, std::move(out)).first->second;
    };
    AWord result;
    for (auto l : word) {
      const AWord& f = flat(l);
      if (result.size() + f.size() > kMaxLen) throw Error("flattened word too long");
      result.insert(result.end(), f.begin(), f.end());
    }
    if (check_flatten_contract(aug, word, result, F)) return result;
  }
  throw Error("flattening contract could not be established");
}

bool validate_bounded_letter(const AugWfa& aug, ALetter l, const std::function<std::int64_t(int)>& length_fn,
                             int max_depth) {
  const LetterDef& d = aug.letter(l);
  if (d.kind == LetterKind::Base || d.kind == LetterKind::Jump) return true;
  if (d.depth > max_depth) return false;
  if (d.kind == LetterKind::Rebase) {
    LetterDef c;
    c.kind = LetterKind::Cactus;
    c.q = d.q;
    c.T = d.T;
    c.word = d.word;
    auto alpha = aug.find(c);
    return alpha && validate_bounded_letter(aug, *alpha, length_fn, max_depth);
  }
  if (d.degenerate) return false;
  if (static_cast<std::int64_t>(d.word.size()) > length_fn(d.depth)) return false;
  for (auto x : d.word)
    if (!validate_bounded_letter(aug, x, length_fn, max_depth)) return false;
  return true;
}

nlohmann::json letter_to_json(const AugWfa& aug, ALetter l) {
  const Wfa& a = aug.base();
  const LetterDef& d = aug.letter(l);
  auto set_json = [&](int q, Mask T) {
    nlohmann::json ts = nlohmann::json::array();
    for (int p : mask_members(T)) ts.push_back(a.state_name(p));
    return nlohmann::json{{"baseline", a.state_name(q)}, {"T", ts}};
  };
  switch (d.kind) {
    case LetterKind::Base: {
      const auto& t = a.transitions()[d.trans];
      return {{"kind", "base"}, {"from", a.state_name(t.from)}, {"letter", a.letter_name(t.letter)}, {"to", a.state_name(t.to)}};
    }
    case LetterKind::Cactus:
      return {{"kind", "cactus"}, {"set", set_json(d.q, d.T)}, {"word", word_to_json(aug, d.word)}};
    case LetterKind::Rebase:
      return {{"kind", "rebase"},
              {"set", set_json(d.q, d.T)},
              {"word", word_to_json(aug, d.word)},
              {"from", a.state_name(d.s.p)},
              {"to", a.state_name(d.r.p)}};
    case LetterKind::Jump:
      return {{"kind", "jump"}, {"set", set_json(d.q, d.T)}, {"to", a.state_name(d.q2)}};
  }
  return {};
}

nlohmann::json word_to_json(const AugWfa& aug, const AWord& w) {
  nlohmann::json j = nlohmann::json::array();
  for (auto l : w) j.push_back(letter_to_json(aug, l));
  return j;
}

ALetter letter_from_json(AugWfa& aug, const nlohmann::json& j) {
  const Wfa& a = aug.base();
  try {
    if (j.is_string()) {
      // shorthand "from:letter:to" for base letters
      auto s = j.get<std::string>();
      auto c1 = s.find(':'), c2 = s.rfind(':');
      if (c1 == std::string::npos || c1 == c2) throw Error("bad letter shorthand: " + s);
      return aug.base_letter(a.state_id(s.substr(0, c1)), a.letter_id(s.substr(c1 + 1, c2 - c1 - 1)),
                             a.state_id(s.substr(c2 + 1)));
    }
    std::string kind = j.at("kind");
    if (kind == "base")
      return aug.base_letter(a.state_id(j.at("from")), a.letter_id(j.at("letter")), a.state_id(j.at("to")));
    const auto& set = j.at("set");
    int q = a.state_id(set.at("baseline"));
    Mask T = 0;
    for (const auto& s : set.at("T")) T |= Mask(1) << a.state_id(s);
    if (kind == "jump") return aug.jump_letter({q, q, T}, {a.state_id(j.at("to")), a.state_id(j.at("to")), T});
    CycleCandidate cand{q, T, word_from_json(aug, j.at("word"))};
    ALetter alpha = stabilise(aug, cand);
    if (kind == "cactus") return alpha;
    if (kind == "rebase") return make_rebase(aug, alpha, a.state_id(j.at("from")), a.state_id(j.at("to")));
    throw Error("unknown letter kind: " + kind);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed letter json: ") + e.what());
  }
}

AWord word_from_json(AugWfa& aug, const nlohmann::json& j) {
  AWord w;
  for (const auto& x : j) w.push_back(letter_from_json(aug, x));
  return w;
}

}  // namespace trop
