// augmented.cpp
#include "trop/augmented.hpp"

#include <algorithm>
#include <bit>

namespace trop {

int popcount(Mask T) { return std::popcount(T); }

std::vector<int> mask_members(Mask T) {
  std::vector<int> v;
  for (int i = 0; T; ++i, T >>= 1)
    if (T & 1) v.push_back(i);
  return v;
}

std::string mask_str(const Wfa& a, Mask T) {
  std::string s = "{";
  bool first = true;
  for (int i : mask_members(T)) {
    if (!first) s += ",";
    s += a.state_name(i);
    first = false;
  }
  return s + "}";
}

AugWfa::AugWfa(Wfa a) : a_(std::move(a)) {
  if (a_.num_states() > 31) throw Error("augmented construction supports at most 31 states");
  const auto& ts = a_.transitions();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    LetterDef d;
    d.kind = LetterKind::Base;
    d.trans = static_cast<int>(i);
    Weight m = Weight::zero();
    for (const auto& t : ts)
      if (t.letter == ts[i].letter) m = std::max(m, wabs(t.weight - ts[i].weight));
    d.wmax = m;
    index_.emplace(key_of(d), static_cast<ALetter>(i));
    letters_.push_back(std::move(d));
  }
}

AugState AugWfa::initial() const {
  int q0 = a_.initial();
  return {q0, q0, Mask(1) << q0};
}

Mask AugWfa::post(Mask T, LetterId sigma) const {
  Mask r = 0;
  for (int p : mask_members(T))
    for (const auto& e : a_.out(p, sigma)) r |= Mask(1) << e.to;
  return r;
}

ALetter AugWfa::base_letter(StateId from, LetterId sigma, StateId to) const {
  const auto& ts = a_.transitions();
  auto it = std::lower_bound(ts.begin(), ts.end(), Transition{from, sigma, Weight(std::numeric_limits<std::int64_t>::min()), 0},
                             [](const Transition& x, const Transition& y) {
                               return std::tie(x.from, x.letter, x.to) < std::tie(y.from, y.letter, y.to);
                             });
  for (; it != ts.end() && it->from == from && it->letter == sigma; ++it)
    if (it->to == to) return static_cast<ALetter>(it - ts.begin());
  throw Error("no transition " + a_.state_name(from) + " -" + a_.letter_name(sigma) + "-> " + a_.state_name(to));
}

int AugWfa::num_letters() const {
  std::lock_guard lock(mu_);
  return static_cast<int>(letters_.size());
}

const LetterDef& AugWfa::letter(ALetter id) const {
  std::lock_guard lock(mu_);
  if (id < 0 || id >= static_cast<int>(letters_.size())) throw Error("unknown augmented letter");
  return letters_[id];
}

AugWfa::Key AugWfa::key_of(const LetterDef& d) {
  return {static_cast<int>(d.kind), d.trans, d.q, d.T, d.word, d.s.p, d.s.q, d.s.T, d.r.p, d.r.q, d.r.T, d.q2};
}

std::optional<ALetter> AugWfa::find(const LetterDef& def) const {
  std::lock_guard lock(mu_);
  auto it = index_.find(key_of(def));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ALetter AugWfa::intern(LetterDef def) {
  std::lock_guard lock(mu_);
  auto key = key_of(def);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  ALetter id = static_cast<ALetter>(letters_.size());
  if (id >= (1 << 21)) throw Error("letter registry full");
  letters_.push_back(std::move(def));
  index_.emplace(std::move(key), id);
  return id;
}

ALetter AugWfa::jump_letter(const AugState& from, const AugState& to) {
  if (from.T != to.T) throw Error("reachable-set-mismatch");
  if (!(from.T >> from.q & 1) || !(to.T >> to.q & 1)) throw Error("jump baseline outside the reachable set");
  LetterDef d;
  d.kind = LetterKind::Jump;
  d.q = from.q;
  d.q2 = to.q;
  d.T = from.T;
  return intern(std::move(d));
}

const std::vector<std::pair<AugState, Weight>>& AugWfa::step(const AugState& s, ALetter l) const {
  std::uint64_t key = std::uint64_t(s.T) | std::uint64_t(s.q) << 32 | std::uint64_t(s.p) << 37 | std::uint64_t(l) << 42;
  {
    std::lock_guard lock(mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return *it->second;
  }
  const LetterDef& d = letter(l);
  auto out = std::make_unique<std::vector<std::pair<AugState, Weight>>>();
  switch (d.kind) {
    case LetterKind::Base: {
      const auto& t = a_.transitions()[d.trans];
      if (s.q != t.from) break;
      Mask T2 = post(s.T, t.letter);
      for (const auto& e : a_.out(s.p, t.letter)) out->push_back({{e.to, t.to, T2}, e.weight - t.weight});
      break;
    }
    case LetterKind::Cactus:
      if (s.q != d.q || s.T != d.T) break;
      for (auto [p2, w] : d.table[s.p]) out->push_back({{p2, d.q, d.T}, w});
      break;
    case LetterKind::Rebase:
      if (s.q != d.s.p || s.T != d.T) break;
      for (auto [p2, w] : d.table[s.p]) out->push_back({{p2, d.r.p, d.T}, w});
      break;
    case LetterKind::Jump:
      if (s.q != d.q || s.T != d.T) break;
      out->push_back({{s.p, d.q2, d.T}, Weight::zero()});
      break;
  }
  std::sort(out->begin(), out->end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::lock_guard lock(mu_);
  auto [it, inserted] = memo_.emplace(key, std::move(out));
  return *it->second;
}

Weight AugWfa::trans_weight(const AugState& s, ALetter l, const AugState& t) const {
  for (const auto& [x, w] : step(s, l))
    if (x == t) return w;
  return Weight::inf();
}

std::string AugWfa::state_str(const AugState& s) const {
  return "(" + a_.state_name(s.p) + "," + a_.state_name(s.q) + "," + mask_str(a_, s.T) + ")";
}

std::string AugWfa::letter_str(ALetter l) const {
  const LetterDef& d = letter(l);
  switch (d.kind) {
    case LetterKind::Base: {
      const auto& t = a_.transitions()[d.trans];
      return "<" + a_.state_name(t.from) + "," + a_.letter_name(t.letter) + "," + t.weight.str() + "," +
             a_.state_name(t.to) + ">";
    }
    case LetterKind::Cactus:
      return "alpha[" + a_.state_name(d.q) + "," + mask_str(a_, d.T) + "](" + word_str(d.word) + ")";
    case LetterKind::Rebase:
      return "beta[" + a_.state_name(d.q) + "," + mask_str(a_, d.T) + "](" + word_str(d.word) + ";" +
             a_.state_name(d.s.p) + "->" + a_.state_name(d.r.p) + ")";
    case LetterKind::Jump:
      return "jump[" + a_.state_name(d.q) + "->" + a_.state_name(d.q2) + "," + mask_str(a_, d.T) + "]";
  }
  return "?";
}

std::string AugWfa::word_str(const AWord& w) const {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += " ";
    s += letter_str(w[i]);
  }
  return s;
}

AugConfig aug_unit(const AugState& s) { return {{s, Weight::zero()}}; }

AugConfig aug_step(const AugWfa& aug, const AugConfig& c, ALetter l) {
  AugConfig d;
  for (const auto& [s, v] : c)
    for (const auto& [t, w] : aug.step(s, l)) {
      Weight x = v + w;
      auto [it, fresh] = d.emplace(t, x);
      if (!fresh) it->second = wmin(it->second, x);
    }
  return d;
}

AugConfig aug_xconf(const AugWfa& aug, const AugConfig& c, const AWord& w) {
  AugConfig d = c;
  for (auto l : w) d = aug_step(aug, d, l);
  return d;
}

Weight aug_min(const AugConfig& c) {
  Weight m = Weight::inf();
  for (const auto& [s, v] : c) m = wmin(m, v);
  return m;
}

AugSet aug_support(const AugConfig& c) {
  AugSet s;
  for (const auto& [x, v] : c) s.insert(x);
  return s;
}

Weight aug_mwt(const AugWfa& aug, const AugSet& from, const AWord& w, const AugSet& to) {
  AugConfig c;
  for (const auto& s : from) c[s] = Weight::zero();
  c = aug_xconf(aug, c, w);
  Weight m = Weight::inf();
  for (const auto& [s, v] : c)
    if (to.count(s)) m = wmin(m, v);
  return m;
}

AugSet reach(const AugWfa& aug, const AugSet& from, const AWord& w) {
  AugSet cur = from;
  for (auto l : w) {
    AugSet nxt;
    for (const auto& s : cur)
      for (const auto& [t, x] : aug.step(s, l)) nxt.insert(t);
    cur = std::move(nxt);
  }
  return cur;
}

AugSet saturated(const AugWfa&, int q, Mask T) {
  AugSet s;
  for (int p : mask_members(T)) s.insert({p, q, T});
  return s;
}

AugSet ghost(const AugWfa& aug, const AugSet& reached) {
  if (reached.empty()) return {};
  const auto& f = *reached.begin();
  for (const auto& s : reached)
    if (s.q != f.q || s.T != f.T) throw Error("reached states do not share a baseline and reachable set");
  return saturated(aug, f.q, f.T);
}

AugSet ghost_reach(const AugWfa& aug, const AugState& s, const AWord& w) { return ghost(aug, reach(aug, {s}, w)); }

void check_aug_run(const AugWfa& aug, const AugRun& run) {
  Weight total = Weight::zero();
  for (std::size_t i = 0; i < run.steps.size(); ++i) {
    const auto& s = run.steps[i];
    if (i && !(run.steps[i - 1].to == s.from)) throw Error("invalid-run: disconnected at step " + std::to_string(i));
    if (!s.weight.finite() || aug.trans_weight(s.from, s.letter, s.to) != s.weight)
      throw Error("invalid-run: no such transition at step " + std::to_string(i));
    total += s.weight;
  }
  if (total != run.wt) throw Error("invalid-run: weight mismatch");
}

bool aug_is_seamless(const AugWfa& aug, const AugConfig& start, const AugRun& run) {
  check_aug_run(aug, run);
  if (run.steps.empty()) return true;
  auto it = start.find(run.steps.front().from);
  if (it == start.end()) throw Error("invalid-run: starts outside the support");
  AugConfig c = start;
  Weight acc = it->second;
  for (const auto& s : run.steps) {
    c = aug_step(aug, c, s.letter);
    acc += s.weight;
    if (c.at(s.to) != acc) return false;
  }
  return true;
}

std::optional<AugRun> aug_min_run(const AugWfa& aug, const AugConfig& start, const AWord& w, const AugState& target) {
  std::vector<AugConfig> cs{start};
  for (auto l : w) cs.push_back(aug_step(aug, cs.back(), l));
  auto last = cs.back().find(target);
  if (last == cs.back().end()) return std::nullopt;
  AugRun run;
  AugState cur = target;
  for (std::size_t i = w.size(); i-- > 0;) {
    Weight want = cs[i + 1].at(cur);
    bool found = false;
    for (const auto& [p, v] : cs[i]) {
      Weight e = aug.trans_weight(p, w[i], cur);
      if (e.finite() && v + e == want) {
        run.steps.push_back({p, w[i], e, cur});
        cur = p;
        found = true;
        break;
      }
    }
    if (!found) throw std::logic_error("min run backtracking failed");
  }
  std::reverse(run.steps.begin(), run.steps.end());
  for (const auto& s : run.steps) run.wt += s.weight;
  return run;
}

std::optional<std::vector<std::pair<int, Mask>>> baseline_track(const AugWfa& aug, const AugState& s, const AWord& w) {
  std::vector<std::pair<int, Mask>> tr{{s.q, s.T}};
  int q = s.q;
  Mask T = s.T;
  for (auto l : w) {
    const LetterDef& d = aug.letter(l);
    switch (d.kind) {
      case LetterKind::Base: {
        const auto& t = aug.base().transitions()[d.trans];
        if (q != t.from) return std::nullopt;
        q = t.to;
        T = aug.post(T, t.letter);
        break;
      }
      case LetterKind::Cactus:
        if (q != d.q || T != d.T) return std::nullopt;
        break;
      case LetterKind::Rebase:
        if (q != d.s.p || T != d.T) return std::nullopt;
        q = d.r.p;
        break;
      case LetterKind::Jump:
        if (q != d.q || T != d.T) return std::nullopt;
        q = d.q2;
        break;
    }
    tr.push_back({q, T});
  }
  return tr;
}

std::optional<AugRun> baseline_run(const AugWfa& aug, const AugState& s, const AWord& w) {
  if (s.p != s.q) return std::nullopt;
  AugRun run;
  AugState cur = s;
  for (auto l : w) {
    bool found = false;
    for (const auto& [t, x] : aug.step(cur, l))
      if (t.p == t.q) {
        run.steps.push_back({cur, l, x, t});
        run.wt += x;
        cur = t;
        found = true;
        break;
      }
    if (!found) return std::nullopt;
  }
  return run;
}

bool jump_free(const AugWfa& aug, const AWord& w) {
  return std::none_of(w.begin(), w.end(), [&](ALetter l) { return aug.letter(l).kind == LetterKind::Jump; });
}

Weight aug_wmax(const AugWfa& aug, const AWord& w) {
  Weight m = Weight::zero();
  for (auto l : w) m = std::max(m, aug.letter(l).wmax);
  return m;
}

Weight aug_maxeff(const AugWfa& aug, const AWord& w) {
  Weight s = Weight::zero();
  for (auto l : w) s += aug.letter(l).wmax;
  return s;
}

int depth(const AugWfa& aug, const AWord& w) {
  int d = 0;
  for (auto l : w) d = std::max(d, aug.letter(l).depth);
  return d;
}

AWord encode_run(const AugWfa& aug, const RunTrace& run) {
  check_run(aug.base(), run);
  if (!run.steps.empty() && run.steps.front().from != aug.base().initial())
    throw Error("invalid-run: does not start at the initial state");
  AWord w;
  for (const auto& s : run.steps) w.push_back(aug.base_letter(s.from, s.letter, s.to));
  return w;
}

AWord concat(AWord a, const AWord& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

AWord power(const AWord& w, std::int64_t k) {
  AWord r;
  for (std::int64_t i = 0; i < k; ++i) r.insert(r.end(), w.begin(), w.end());
  return r;
}

AugRun run_power(const AugRun& r, std::int64_t k) {
  AugRun out;
  for (std::int64_t i = 0; i < k; ++i) {
    out.steps.insert(out.steps.end(), r.steps.begin(), r.steps.end());
    out.wt += r.wt;
  }
  return out;
}

AugState shift_state(const AugState& s, const AugState& anchor) {
  if (s.q != anchor.q || s.T != anchor.T) throw Error("baseline-mismatch");
  return {s.p, anchor.p, s.T};
}

AugSet shift_set(const AugSet& s, const AugState& anchor) {
  AugSet r;
  for (const auto& x : s) r.insert(shift_state(x, anchor));
  return r;
}

AugConfig shift_config(const AugConfig& c, const AugState& anchor) {
  AugConfig r;
  for (const auto& [x, v] : c) r.emplace(shift_state(x, anchor), v);
  return r;
}

namespace {

ALetter shifted_letter(AugWfa& aug, ALetter l, const AugStep& a) {
  const LetterDef& d = aug.letter(l);
  switch (d.kind) {
    case LetterKind::Base: {
      const auto& t = aug.base().transitions()[d.trans];
      return aug.base_letter(a.from.p, t.letter, a.to.p);
    }
    case LetterKind::Cactus:
    case LetterKind::Rebase: {
      // the anchor step stems from the cactus transition (a.from.p, q) -> (a.to.p, q)
      LetterDef cactus;
      cactus.kind = LetterKind::Cactus;
      cactus.q = d.q;
      cactus.T = d.T;
      cactus.word = d.word;
      auto alpha = aug.find(cactus);
      if (!alpha) throw Error("cactus letter is not registered");
      return make_rebase(aug, *alpha, a.from.p, a.to.p);
    }
    case LetterKind::Jump:
      throw Error("shift of a word containing jump letters is not supported");
  }
  return l;
}

}  // namespace

ALetter make_rebase(AugWfa& aug, ALetter cactus, int from, int to) {
  const LetterDef& ad = aug.letter(cactus);
  if (ad.kind != LetterKind::Cactus) throw Error("rebase of a non-cactus letter");
  if (!(ad.T >> from & 1) || !(ad.T >> to & 1)) throw Error("rebase endpoints outside the cycle");
  if (from == ad.q && to == ad.q) return cactus;
  LetterDef rb;
  rb.kind = LetterKind::Rebase;
  rb.q = ad.q;
  rb.T = ad.T;
  rb.word = ad.word;
  rb.s = {from, ad.q, ad.T};
  rb.r = {to, ad.q, ad.T};
  if (auto id = aug.find(rb)) return *id;
  Weight c = Weight::inf();
  for (auto [p2, w] : ad.table[from])
    if (p2 == to) c = w;
  if (!c.finite()) throw Error("not-grounded: no cactus transition between the rebase endpoints");
  rb.table.assign(ad.table.size(), {});
  Weight m = Weight::zero();
  for (std::size_t p = 0; p < ad.table.size(); ++p)
    for (auto [p2, w] : ad.table[p]) {
      rb.table[p].push_back({p2, w - c});
      m = std::max(m, wabs(w - c));
    }
  rb.depth = ad.depth;
  rb.wmax = m;
  return aug.intern(std::move(rb));
}

namespace {

void check_anchor(const AugWfa& aug, const AWord& w, const AugRun& anchor) {
  if (anchor.steps.size() != w.size()) throw Error("anchor-word-mismatch");
  for (std::size_t i = 0; i < w.size(); ++i)
    if (anchor.steps[i].letter != w[i]) throw Error("anchor-word-mismatch");
  check_aug_run(aug, anchor);
}

}  // namespace

AWord shift_word(AugWfa& aug, const AWord& w, const AugRun& anchor) {
  check_anchor(aug, w, anchor);
  AWord out;
  for (std::size_t i = 0; i < w.size(); ++i) out.push_back(shifted_letter(aug, w[i], anchor.steps[i]));
  return out;
}

AugRun shift_run(AugWfa& aug, const AugRun& run, const AugRun& anchor) {
  check_aug_run(aug, run);
  if (run.steps.size() != anchor.steps.size()) throw Error("word-mismatch");
  AWord w;
  for (std::size_t i = 0; i < run.steps.size(); ++i) {
    if (run.steps[i].letter != anchor.steps[i].letter) throw Error("word-mismatch");
    w.push_back(run.steps[i].letter);
  }
  AWord sw = shift_word(aug, w, anchor);
  AugRun out;
  for (std::size_t i = 0; i < run.steps.size(); ++i) {
    const auto& x = run.steps[i];
    const auto& a = anchor.steps[i];
    AugStep s{shift_state(x.from, a.from), sw[i], x.weight - a.weight, shift_state(x.to, a.to)};
    out.steps.push_back(s);
    out.wt += s.weight;
  }
  return out;
}

}  // namespace trop
