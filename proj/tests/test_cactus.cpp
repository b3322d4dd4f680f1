#include <doctest.h>

#include "cactus_helpers.hpp"

using namespace testing_support;

namespace {

// negative cycle detection by Floyd-Warshall
bool has_negative_cycle(const Mat& M) {
  Mat d = M;
  int n = static_cast<int>(M.size());
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i][j] = wmin(d[i][j], d[i][k] + d[k][j]);
  for (int i = 0; i < n; ++i)
    if (d[i][i] < Weight(0)) return true;
  return false;
}

// minimum mean over simple cycles, as an exact fraction
std::pair<std::int64_t, std::int64_t> min_mean_simple(const Mat& M) {
  int n = static_cast<int>(M.size());
  std::pair<std::int64_t, std::int64_t> best{0, 0};
  std::vector<int> path;
  std::vector<bool> used(n);
  std::function<void(int, int, std::int64_t)> go = [&](int start, int cur, std::int64_t acc) {
    for (int nx = start; nx < n; ++nx) {
      if (!M[cur][nx].finite()) continue;
      std::int64_t w = acc + M[cur][nx].value();
      std::int64_t len = static_cast<std::int64_t>(path.size());
      if (nx == start) {
        if (best.second == 0 || w * best.second < best.first * len) best = {w, len};
      } else if (!used[nx]) {
        used[nx] = true;
        path.push_back(nx);
        go(start, nx, w);
        path.pop_back();
        used[nx] = false;
      }
    }
  };
  for (int s = 0; s < n; ++s) {
    used.assign(n, false);
    used[s] = true;
    path = {s};
    go(s, s, 0);
  }
  return best;
}

Mat brute_matrix(const AugWfa& aug, const CycleCandidate& c, const AWord& w) {
  auto mem = mask_members(c.T);
  int n = static_cast<int>(mem.size());
  Mat M(n, std::vector<Weight>(n, Weight::inf()));
  for (int i = 0; i < n; ++i) {
    auto conf = aug_xconf(aug, aug_unit({mem[i], c.q, c.T}), w);
    for (int j = 0; j < n; ++j) {
      auto it = conf.find({mem[j], c.q, c.T});
      if (it != conf.end()) M[i][j] = it->second;
    }
  }
  return M;
}

}  // namespace

TEST_CASE("stabilisation constants") {
  CHECK(stabilisation_constant(1) == 1);
  CHECK(stabilisation_constant(2) == 4);
  CHECK(stabilisation_constant(3) == 18);
  CHECK(stabilisation_constant(4) == 96);
  CHECK(declared_size(1) == 1);
  for (int n = 2; n <= 14; ++n) {
    mpz_class expect = mpz_class(n) * (n + 1) * (mpz_class(1) << (n - 2));
    CHECK(declared_size(n) == expect);
  }
  AugWfa aug(fig1());
  CycleCandidate c{1, 0b110, {aug.base_letter(1, 0, 1)}};
  CHECK(cycle_m(aug, c) == 4);
  // |S| = 24 for three states, and 24 * 24! does not fit in 64 bits
  CHECK_THROWS_AS(cycle_m(aug, c, MMode::Declared), Error);
  AugWfa one(det1());
  CHECK(cycle_m(one, {0, 1, {one.base_letter(0, 0, 0)}}, MMode::Declared) == 1);
}

TEST_CASE("matrix powers agree with repeated products") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> wt(-3, 3);
  std::bernoulli_distribution fin(0.6);
  for (int it = 0; it < 50; ++it) {
    int n = 1 + it % 4;
    Mat M(n, std::vector<Weight>(n, Weight::inf()));
    for (auto& row : M)
      for (auto& v : row)
        if (fin(rng)) v = wt(rng);
    Mat P = mat_identity(n);
    for (int e = 0; e <= 9; ++e) {
      CHECK(mat_pow(M, e) == P);
      P = mat_mul(P, M);
    }
  }
}

TEST_CASE("fig1 cycles") {
  AugWfa aug(fig1());
  // reading a along the qa-run: qb gains -1 per letter
  CycleCandidate ca{1, 0b110, {aug.base_letter(1, 0, 1)}};
  auto info = analyse_cycle(aug, ca);
  CHECK(info.reflexive);
  CHECK(info.proper);
  CHECK(info.M == Mat{{0, Weight::inf()}, {Weight::inf(), -1}});
  CHECK_FALSE(is_stable_cycle(aug, ca));
  CHECK(ref_states(aug, ca) == AugSet{{1, 1, 0b110}, {2, 1, 0b110}});
  CHECK(min_states(aug, ca) == AugSet{{2, 1, 0b110}});
  auto sl = min_slope_cycle(aug, ca);
  CHECK(sl.num == -1);
  CHECK(sl.k == 1);
  auto sh = shift_to_stable(aug, ca);
  CHECK(sh.cycle.q == 2);
  CHECK(sh.cycle.word == AWord{aug.base_letter(2, 0, 2)});
  CHECK(is_stable_cycle(aug, sh.cycle));
  CHECK_THROWS_AS(grounded_pairs(aug, ca), Error);

  auto gp = grounded_pairs(aug, sh.cycle);
  CHECK(gp.m == 4);
  CHECK(gp.min_states == AugSet{{2, 2, 0b110}});
  REQUIRE(gp.pairs.size() == 1);
  CHECK(gp.pairs[0].s == AugState{2, 2, 0b110});
  CHECK(gp.pairs[0].weight == Weight(0));
  CHECK_FALSE(is_degenerate(aug, sh.cycle));

  ALetter alpha = stabilise(aug, sh.cycle);
  CHECK(stabilise(aug, sh.cycle) == alpha);
  CHECK(aug.letter(alpha).depth == 1);
  CHECK_FALSE(aug.letter(alpha).degenerate);
  AWord pre{aug.base_letter(0, 0, 2)};
  auto c = aug_xconf(aug, aug_unit(aug.initial()), concat(pre, {alpha}));
  CHECK(c == AugConfig{{{2, 2, 0b110}, 0}});

  auto u = unfold(aug, pre, alpha, {aug.base_letter(2, 1, 2)}, 5);
  CHECK(u.reps == 2 * 4 * u.M0);
  CHECK(check_unfold_contract(aug, pre, alpha, {aug.base_letter(2, 1, 2)}, u, 5));
  CHECK_THROWS_AS(unfold(aug, pre, alpha, {}, 2), Error);
  auto flat = flatten(aug, concat(pre, {alpha}), 5);
  CHECK(check_flatten_contract(aug, concat(pre, {alpha}), flat, 5));
}

TEST_CASE("a one-state cycle is degenerate") {
  AugWfa aug(det1());
  CycleCandidate c{0, 1, {aug.base_letter(0, 0, 0)}};
  CHECK(is_stable_cycle(aug, c));
  CHECK(is_degenerate(aug, c));
  ALetter alpha = stabilise(aug, c);
  CHECK(aug.letter(alpha).degenerate);
  CHECK(cactus_chain_check(aug, alpha) == alpha);
  auto L = [](int) { return std::int64_t(100); };
  CHECK_FALSE(validate_bounded_letter(aug, alpha, L, 5));
  CHECK(validate_bounded_letter(aug, c.word[0], L, 5));
}

TEST_CASE("non-reflexive candidates are rejected") {
  AugWfa aug(fig1());
  // from {q0} the set changes after one letter
  CycleCandidate c{0, 1, {aug.base_letter(0, 0, 1)}};
  CHECK_THROWS_AS(is_stable_cycle(aug, c), Error);
  CHECK_THROWS_AS(min_slope_cycle(aug, c), Error);
  CHECK_THROWS_AS(stabilise(aug, c), Error);
  CHECK_THROWS_AS(analyse_cycle(aug, {0, 0b110, {aug.base_letter(1, 0, 1)}}), Error);
  CHECK_THROWS_AS(analyse_cycle(aug, {1, 0b110, {}}), Error);
}

TEST_CASE("random cycles: stability, slopes and stable shifts") {
  std::mt19937 rng(11);
  int cycles = 0, unstable = 0;
  for (int it = 0; it < 800 && cycles < 300; ++it) {
    auto f = random_cycle(rng, 4, -2, 2);
    if (!f) continue;
    ++cycles;
    AugWfa& aug = *f->aug;
    auto info = analyse_cycle(aug, f->cand);
    REQUIRE(info.reflexive);
    REQUIRE(info.proper);
    CHECK(info.M == brute_matrix(aug, f->cand, f->cand.word));
    bool stable = is_stable_cycle(aug, f->cand);
    int b = info.index_of(f->cand.q);
    CHECK(stable == (!has_negative_cycle(info.M) && info.M[b][b] == Weight(0)));
    if (!stable) ++unstable;
    auto sl = min_slope_cycle(aug, f->cand);
    auto mm = min_mean_simple(info.M);
    CHECK(static_cast<std::int64_t>(sl.num) * mm.second == mm.first * sl.k);
    check_aug_run(aug, sl.run);
    CHECK(sl.run.steps.front().from == sl.run.steps.back().to);
    CHECK(sl.run.wt == Weight(sl.num));
    auto sh = shift_to_stable(aug, f->cand);
    CHECK(is_stable_cycle(aug, sh.cycle));
    CHECK(sh.cycle.T == f->cand.T);
    if (stable) CHECK(sh.cycle == f->cand);
  }
  CHECK(cycles >= 200);
  CHECK(unstable >= 20);
}

TEST_CASE("grounded pairs against direct evaluation") {
  std::mt19937 rng(17);
  int n = 0;
  for (int it = 0; it < 400 && n < 80; ++it) {
    auto f = random_stable_cycle(rng, 4, -2, 2);
    if (!f) continue;
    ++n;
    AugWfa& aug = *f->aug;
    auto gp = grounded_pairs(aug, f->cand);
    AWord wm = power(f->cand.word, gp.m);
    Mat Mm = brute_matrix(aug, f->cand, wm);
    auto mem = mask_members(f->cand.T);
    int k = static_cast<int>(mem.size());
    AugState base{f->cand.q, f->cand.q, f->cand.T};
    CHECK(gp.min_states.count(base));
    for (const auto& g : gp.min_states) {
      int gi = static_cast<int>(std::find(mem.begin(), mem.end(), g.p) - mem.begin());
      CHECK(Mm[gi][gi] == Weight(0));
    }
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        Weight best = Weight::inf();
        for (int g = 0; g < k; ++g)
          if (Mm[g][g] == Weight(0)) best = wmin(best, Mm[i][g] + Mm[g][j]);
        const auto* p = gp.find({mem[i], f->cand.q, f->cand.T}, {mem[j], f->cand.q, f->cand.T});
        if (best.finite()) {
          REQUIRE(p);
          CHECK(p->weight == best);
        } else {
          CHECK_FALSE(p);
        }
      }
    // the letter's step is the grounded relation
    ALetter alpha = stabilise(aug, f->cand);
    for (const auto& p : gp.pairs) CHECK(aug.trans_weight(p.s, alpha, p.r) == p.weight);
  }
  CHECK(n >= 50);
}

TEST_CASE("pumping at M0 against brute-force evaluation") {
  std::mt19937 rng(23);
  int n = 0;
  for (int it = 0; it < 600 && n < 60; ++it) {
    auto f = random_stable_cycle(rng, 4, -2, 2);
    if (!f) continue;
    ++n;
    AugWfa& aug = *f->aug;
    ALetter alpha = stabilise(aug, f->cand);
    std::int64_t thr = it % 7;
    auto pb = find_M0(aug, alpha, thr);
    CHECK(pb.M0 >= 1);
    CHECK(pb.checked_up_to >= pb.M0 + 2);
    auto gp = grounded_pairs(aug, f->cand);
    auto mem = mask_members(f->cand.T);
    auto holds = [&](std::int64_t K) {
      Mat P = brute_matrix(aug, f->cand, power(f->cand.word, 2 * pb.m * K));
      bool ok = true;
      for (std::size_t i = 0; i < mem.size(); ++i)
        for (std::size_t j = 0; j < mem.size(); ++j) {
          const auto* g = gp.find({mem[i], f->cand.q, f->cand.T}, {mem[j], f->cand.q, f->cand.T});
          ok = ok && (g ? P[i][j] == g->weight : P[i][j] > Weight(thr));
        }
      return ok;
    };
    for (std::int64_t K = pb.M0; K <= pb.M0 + 2; ++K) CHECK(holds(K));
    if (pb.M0 > 1) CHECK_FALSE(holds(pb.M0 - 1));
  }
  CHECK(n >= 50);
}

TEST_CASE("unfolding and flattening contracts") {
  std::mt19937 rng(29);
  int depth1 = 0, depth2 = 0;
  for (int it = 0; it < 800 && (depth1 < 60 || depth2 < 20); ++it) {
    auto f = random_stable_cycle(rng, 3, -2, 2);
    if (!f) continue;
    AugWfa& aug = *f->aug;
    ALetter alpha = stabilise(aug, f->cand);
    ALetter top = alpha;
    if (it % 3 == 0) {
      // a cycle over the cactus letter followed by the cycle word
      CycleCandidate outer{f->cand.q, f->cand.T, concat({alpha}, f->cand.word)};
      if (!is_stable_cycle(aug, outer)) continue;
      top = stabilise(aug, outer);
      CHECK(aug.letter(top).depth == 2);
      ++depth2;
    } else {
      ++depth1;
    }
    AugState entry{f->cand.q, f->cand.q, f->cand.T};
    auto tail = random_closed_walk(aug.base(), rng, f->cand.q, 3);
    AWord suffix = tail ? baseline_letters(aug, *tail) : AWord{};
    AWord whole = concat(concat(f->prefix, {top}), suffix);
    REQUIRE(reach(aug, {aug.initial()}, f->prefix).count(entry));
    std::int64_t F = (wmul(aug_maxeff(aug, whole), 2) + Weight(1 + it % 4)).value();
    auto u = unfold(aug, f->prefix, top, suffix, F);
    std::string why;
    CHECK_MESSAGE(check_unfold_contract(aug, f->prefix, top, suffix, u, F, &why), why);
    auto flat = flatten(aug, whole, F);
    CHECK_MESSAGE(check_flatten_contract(aug, whole, flat, F, &why), why);
    for (auto l : flat) CHECK(aug.letter(l).kind == LetterKind::Base);
  }
  CHECK(depth1 >= 50);
  CHECK(depth2 >= 10);
}

TEST_CASE("shifts over words with cactus letters") {
  std::mt19937 rng(31);
  int tuples = 0;
  for (int it = 0; it < 600 && tuples < 200; ++it) {
    auto f = random_stable_cycle(rng, 3, -2, 2);
    if (!f) continue;
    AugWfa& aug = *f->aug;
    ALetter alpha = stabilise(aug, f->cand);
    auto tail = random_closed_walk(aug.base(), rng, f->cand.q, 2);
    AWord w = concat(concat(f->prefix, {alpha}), tail ? baseline_letters(aug, *tail) : AWord{});
    auto r0 = random_aug_run(aug, rng, aug.initial(), w);
    auto r1 = random_aug_run(aug, rng, aug.initial(), w);
    if (!r0 || !r1) continue;
    ++tuples;
    auto m1 = shift_run(aug, *r1, *r0);
    auto m0 = shift_run(aug, *r0, *r0);
    check_aug_run(aug, m1);
    check_aug_run(aug, m0);
    for (const auto& s : m0.steps) CHECK(s.weight == Weight(0));
    Weight a = 0, b = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      a += r1->steps[i].weight - r0->steps[i].weight;
      b += m1.steps[i].weight;
      CHECK(a == b);
    }
    AWord shifted = shift_word(aug, w, *r0);
    for (std::size_t i = 0; i < w.size(); ++i) {
      auto k = aug.letter(shifted[i]).kind;
      if (aug.letter(w[i]).kind == LetterKind::Cactus) CHECK((k == LetterKind::Cactus || k == LetterKind::Rebase));
    }
  }
  CHECK(tuples >= 200);
}

TEST_CASE("rebase letters") {
  AugWfa aug(fig1());
  CycleCandidate c{2, 0b110, {aug.base_letter(2, 0, 2)}};
  ALetter alpha = stabilise(aug, c);
  CHECK(rebase(aug, alpha, {2, 2, 0b110}, {2, 2, 0b110}) == alpha);
  CHECK_THROWS_AS(rebase(aug, alpha, {2, 1, 0b110}, {2, 1, 0b110}), Error);
  CHECK_THROWS_AS(rebase(aug, aug.base_letter(2, 0, 2), {2, 2, 0b110}, {2, 2, 0b110}), Error);
  CHECK_THROWS_AS(flatten(aug, {aug.jump_letter({2, 2, 0b110}, {1, 1, 0b110})}, 10), Error);
}

TEST_CASE("letter json round trip") {
  std::mt19937 rng(37);
  int n = 0;
  for (int it = 0; it < 300 && n < 40; ++it) {
    auto f = random_stable_cycle(rng, 3, -2, 2);
    if (!f) continue;
    ++n;
    AugWfa& aug = *f->aug;
    ALetter alpha = stabilise(aug, f->cand);
    AWord w = concat(f->prefix, {alpha});
    auto j = word_to_json(aug, w);
    AugWfa fresh(aug.base());
    AWord back = word_from_json(fresh, nlohmann::json::parse(j.dump()));
    CHECK(word_to_json(fresh, back) == j);
    CHECK(aug_xconf(fresh, aug_unit(fresh.initial()), back) == aug_xconf(aug, aug_unit(aug.initial()), w));
    for (const auto& s : aug.step({f->cand.q, f->cand.q, f->cand.T}, alpha)) {
      ALetter rb = rebase(aug, alpha, {f->cand.q, f->cand.q, f->cand.T}, {s.first.p, f->cand.q, f->cand.T});
      auto jr = letter_to_json(aug, rb);
      CHECK(letter_to_json(fresh, letter_from_json(fresh, jr)) == jr);
    }
  }
  CHECK(n >= 20);
  AugWfa aug(fig1());
  CHECK_THROWS_AS(letter_from_json(aug, nlohmann::json{{"kind", "cactus"}}), Error);
  CHECK_THROWS_AS(letter_from_json(aug, nlohmann::json{{"kind", "odd"}, {"set", {{"baseline", "q0"}, {"T", {"q0"}}}}}), Error);
  CHECK(letter_from_json(aug, "q0:a:qa") == aug.base_letter(0, 0, 1));
}

TEST_CASE("bounded-letter validation") {
  std::mt19937 rng(41);
  int n = 0;
  for (int it = 0; it < 2000 && n < 40; ++it) {
    auto f = random_stable_cycle(rng, 3, -2, 2);
    if (!f) continue;
    AugWfa& aug = *f->aug;
    ALetter alpha = stabilise(aug, f->cand);
    if (aug.letter(alpha).degenerate) continue;
    ++n;
    std::int64_t len = static_cast<std::int64_t>(f->cand.word.size());
    CHECK(validate_bounded_letter(aug, alpha, [&](int) { return len; }, 1));
    CHECK_FALSE(validate_bounded_letter(aug, alpha, [&](int) { return len - 1; }, 1));
    CHECK_FALSE(validate_bounded_letter(aug, alpha, [&](int) { return len; }, 0));
  }
  CHECK(n >= 20);
}
