#include <doctest.h>

#include "cactus_helpers.hpp"
#include "trop/sri.hpp"

using namespace testing_support;

namespace {

// q0 reads u into one state per part; x and y loop on each part; z is read by the baseline only
struct Parts {
  std::vector<std::int64_t> offset, kx, ky;
  int baseline = 0;  // index of the baseline part
  std::vector<Transition> extra;
};

Wfa parts_wfa(const Parts& p) {
  int n = static_cast<int>(p.offset.size());
  std::vector<std::string> st{"q0"};
  for (int i = 0; i < n; ++i) st.push_back("p" + std::to_string(i));
  std::vector<Transition> ts;
  for (int i = 0; i < n; ++i) {
    ts.push_back({0, 0, p.offset[i], i + 1});
    ts.push_back({i + 1, 1, p.kx[i], i + 1});
    ts.push_back({i + 1, 2, p.ky[i], i + 1});
  }
  ts.push_back({p.baseline + 1, 3, 0, p.baseline + 1});
  ts.insert(ts.end(), p.extra.begin(), p.extra.end());
  return Wfa(st, {"u", "x", "y", "z"}, 0, ts);
}

struct Split {
  AWord u, x, y, v;
};

Split parts_split(const AugWfa& aug, const Parts& p) {
  int b = p.baseline + 1;
  return {{aug.base_letter(0, 0, b)}, {aug.base_letter(b, 1, b)}, {aug.base_letter(b, 2, b)}, {}};
}

SriParams params(SriKind kind = SriKind::Simple) {
  SriParams sp;
  sp.length_fn = [](int) { return std::int64_t(1) << 40; };
  sp.kind = kind;
  sp.dom = {2, {}};
  return sp;
}

std::int64_t gap_of(const AugWfa& aug, const Split& s) {
  auto g = ghost_reach(aug, aug.initial(), s.u).begin();
  std::int64_t m = cycle_m(aug, {g->q, g->T, s.x});
  return (wmul(wmul(wmul(aug_maxeff(aug, concat(s.x, s.y)), 4), declared_size(aug.base().num_states()).get_si()), m))
      .value();
}

// run-structure facts, by enumeration of the runs on z
void check_run_structure(const AugWfa& aug, const SriDecomposition& d, const AWord& z, const std::vector<std::int64_t>& k) {
  auto part_of = [&](const AugState& s) {
    for (std::size_t j = 0; j < d.partition.size(); ++j)
      if (d.partition[j].count(s)) return static_cast<int>(j);
    return -1;
  };
  for (std::size_t j = 0; j < d.partition.size(); ++j) {
    CHECK(Weight(k[j] < 0 ? -k[j] : k[j]) <= aug_maxeff(aug, z));
    for (const auto& s : d.partition[j]) {
      auto to = aug_xconf(aug, aug_unit(s), z);
      for (const auto& [t, w] : to) {
        int jt = part_of(t);
        if (jt >= 0) CHECK(jt <= static_cast<int>(j));
      }
      bool has_source = false;
      for (const auto& r : d.partition[j])
        if (aug_xconf(aug, aug_unit(r), z).count(s)) has_source = true;
      CHECK(has_source);
    }
  }
}

}  // namespace

TEST_CASE("a single part with an identity cycle") {
  Parts p{{0}, {0}, {0}, 0, {}};
  AugWfa aug(parts_wfa(p));
  auto s = parts_split(aug, p);
  auto r = check_sri(aug, s.u, s.x, s.y, s.v, params());
  REQUIRE_MESSAGE(r.sri, r.diagnostic);
  CHECK(r.sri->partition.size() == 1);
  CHECK(r.sri->kx == std::vector<std::int64_t>{0});
  auto f = classify(aug, *r.sri);
  CHECK(f.positive);
  CHECK(f.stable);
  CHECK(f.degenerate == true);
  CHECK(degenerate_shorten(aug, *r.sri, {2, {}}) == concat(s.u, s.y));
  CHECK_THROWS_WITH_AS(bud(aug, *r.sri, {2, {}}, {params().length_fn, params().length_fn, 3}),
                       doctest::Contains("not-stable-nondegenerate"), Error);
  CHECK_THROWS_WITH_AS(shift_kill_positive(aug, *r.sri), doctest::Contains("no-negative-cycle"), Error);
}

TEST_CASE("two parts, positive and stable") {
  Parts probe{{0, 0}, {1, 0}, {1, 0}, 1, {}};
  AugWfa pa(parts_wfa(probe));
  std::int64_t G = gap_of(pa, parts_split(pa, probe));
  CHECK(G > 0);
  Parts p{{-10 * G, 0}, {1, 0}, {1, 0}, 1, {}};
  AugWfa aug(parts_wfa(p));
  auto s = parts_split(aug, p);
  auto r = check_sri(aug, s.u, s.x, s.y, concat(s.v, {aug.base_letter(2, 3, 2)}), params());
  REQUIRE_MESSAGE(r.sri, r.diagnostic);
  CHECK(r.sri->gap == Weight(G));
  REQUIRE(r.sri->partition.size() == 2);
  CHECK(r.sri->kx == std::vector<std::int64_t>{1, 0});
  CHECK(r.sri->ky == std::vector<std::int64_t>{1, 0});
  auto f = classify(aug, *r.sri);
  CHECK(f.positive);
  CHECK_FALSE(f.negative);
  CHECK(f.stable);
  CHECK(f.degenerate == false);
  auto b = bud(aug, *r.sri, {2, {}}, {params().length_fn, params().length_fn, 3});
  CHECK(b.superior);
  CHECK(b.charge_ok);
  CHECK(b.potential_ok);
  CHECK(b.psi_w == Weight(0));
  auto r0 = check_sri(aug, s.u, s.x, s.y, {}, params());
  REQUIRE(r0.sri);
  auto b0 = bud(aug, *r0.sri, {2, {}}, {params().length_fn, params().length_fn, 3});
  CHECK(b0.psi_w == Weight(10 * G - 2));
  CHECK(b0.psi_w2 == Weight(0));
  CHECK(b0.superior);
  auto j = sri_to_json(aug, *r.sri);
  CHECK(j["kx"] == nlohmann::json({1, 0}));
  CHECK(j["partition"].size() == 2);

  // opposite signs on x and y
  Parts q = p;
  q.ky = {-1, 0};
  AugWfa aq(parts_wfa(q));
  auto sq = parts_split(aq, q);
  auto rq = check_sri(aq, sq.u, sq.x, sq.y, sq.v, params());
  CHECK_FALSE(rq.sri);
  CHECK(rq.diagnostic.find("sign") != std::string::npos);

  // parts closer than the gap merge and stop shifting uniformly
  Parts c = p;
  c.offset = {-G / 2, 0};
  AugWfa ac(parts_wfa(c));
  auto sc = parts_split(ac, c);
  auto rc = check_sri(ac, sc.u, sc.x, sc.y, sc.v, params());
  CHECK_FALSE(rc.sri);
  CHECK(rc.diagnostic.find("constant") != std::string::npos);
}

TEST_CASE("a negative general SRI and the shift that kills the positive parts") {
  Parts probe{{0, 0, 0}, {1, 0, -1}, {1, 0, -1}, 1, {}};
  AugWfa pa(parts_wfa(probe));
  std::int64_t G = gap_of(pa, parts_split(pa, probe));
  Parts p{{-10 * G, 0, 10 * G}, {1, 0, -1}, {1, 0, -1}, 1, {}};
  AugWfa aug(parts_wfa(p));
  auto s = parts_split(aug, p);
  auto r = check_sri(aug, s.u, s.x, s.y, s.v, params(SriKind::General));
  REQUIRE_MESSAGE(r.sri, r.diagnostic);
  CHECK(r.sri->partition.size() == 3);
  CHECK(r.sri->kx == std::vector<std::int64_t>{1, 0, -1});
  CHECK(r.sri->kx[0] >= 0);
  auto f = classify(aug, *r.sri);
  CHECK(f.negative);
  CHECK_FALSE(f.stable);
  auto k = shift_kill_positive(aug, *r.sri);
  CHECK(k.ell_prime == 2);
  CHECK(k.ok());
  CHECK(is_stable_cycle(aug, k.shift.cycle));
  CHECK_THROWS_WITH_AS(shift_kill_positive(aug, *r.sri, 3), doctest::Contains("positivity-violated"), Error);
  // with H added the parts are no longer separated
  SriParams big = params(SriKind::General);
  big.H = 20 * G;
  CHECK_FALSE(check_sri(aug, s.u, s.x, s.y, s.v, big).sri);
  // the charge falls across u, ux, uxy, so it is not an SSRI unless the potential cooperates
  auto simple = check_sri(aug, s.u, s.x, s.y, s.v, params());
  CHECK(simple.sri);
}

TEST_CASE("a positive SSRI with a negative ghost cycle") {
  // g is killed in u by a cactus letter, then runs downwards on x
  Wfa a({"q0", "a", "g"}, {"u", "k", "x"}, 0,
        {{0, 0, 0, 1}, {0, 0, 0, 2}, {1, 1, 0, 1}, {2, 1, 1, 2}, {1, 2, 0, 1}, {2, 2, -1, 2}});
  AugWfa aug(a);
  ALetter kill = stabilise(aug, {1, 0b110, {aug.base_letter(1, 1, 1)}});
  CHECK_FALSE(aug.letter(kill).degenerate);
  AWord u{aug.base_letter(0, 0, 1), kill};
  AWord x{aug.base_letter(1, 2, 1)};
  auto r = check_sri(aug, u, x, x, {}, params());
  REQUIRE_MESSAGE(r.sri, r.diagnostic);
  CHECK(r.sri->partition.size() == 1);
  auto f = classify(aug, *r.sri);
  CHECK(f.positive);
  CHECK_FALSE(f.stable);
  auto k = shift_kill_positive(aug, *r.sri, 1);
  CHECK(k.ok());
  CHECK(k.shift.anchor.steps.front().from.p == 2);
  // a degenerate letter is outside the bounded alphabet
  ALetter deg = stabilise(aug, {1, 0b110, {aug.base_letter(1, 2, 1), aug.base_letter(1, 1, 1)}});
  if (aug.letter(deg).degenerate) CHECK_THROWS_WITH_AS(check_sri(aug, u, {deg}, x, {}, params()),
                                                      doctest::Contains("alphabet-mismatch"), Error);
}

TEST_CASE("random SRI: run structure and flavour facts") {
  std::mt19937 rng(59);
  int found = 0, multi = 0;
  for (int it = 0; it < 8000 && found < 400; ++it) {
    int n = 1 + it % 3;
    Parts p;
    p.baseline = std::uniform_int_distribution<int>(0, n - 1)(rng);
    std::uniform_int_distribution<int> k(-1, 1), o(-2, 2);
    for (int i = 0; i < n; ++i) {
      p.kx.push_back(i == p.baseline ? 0 : k(rng));
      p.ky.push_back(i == p.baseline ? 0 : k(rng));
    }
    AugWfa probe(parts_wfa(Parts{std::vector<std::int64_t>(n, 0), p.kx, p.ky, p.baseline, {}}));
    std::int64_t G = gap_of(probe, parts_split(probe, Parts{std::vector<std::int64_t>(n, 0), p.kx, p.ky, p.baseline, {}}));
    for (int i = 0; i < n; ++i) p.offset.push_back(i == p.baseline ? 0 : (std::bernoulli_distribution(0.7)(rng) ? 10 * G * (i - p.baseline) : o(rng)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && std::bernoulli_distribution(0.3)(rng)) p.extra.push_back({i + 1, 1, o(rng), j + 1});
    AugWfa aug(parts_wfa(p));
    auto s = parts_split(aug, p);
    SriKind kind = it % 2 ? SriKind::General : SriKind::Simple;
    std::optional<SriCheck> r;
    try {
      r = check_sri(aug, s.u, s.x, s.y, s.v, params(kind));
    } catch (const Error&) {
      continue;
    }
    if (!r->sri) continue;
    ++found;
    const auto& d = *r->sri;
    if (d.partition.size() > 1) ++multi;
    check_run_structure(aug, d, d.x, d.kx);
    check_run_structure(aug, d, d.y, d.ky);
    for (std::size_t j = 0; j < d.kx.size(); ++j) {
      auto sg = [](std::int64_t v) { return (v > 0) - (v < 0); };
      CHECK(sg(d.kx[j]) == sg(d.ky[j]));
    }
    auto f = classify(aug, d);
    if (f.stable) CHECK(f.positive);
    if (kind == SriKind::General) CHECK(d.kx[0] >= 0);
    if (f.positive) {
      // no negative cycle on x^k inside the support
      AugSet B = aug_support(aug_xconf(aug, aug_unit(aug.initial()), d.u));
      for (const auto& r0 : B) {
        AugConfig c = aug_unit(r0);
        for (int kk = 1; kk <= 24; ++kk) {
          c = aug_xconf(aug, c, d.x);
          if (c.count(r0)) CHECK(c.at(r0) >= Weight(0));
        }
      }
    }
  }
  CHECK(found >= 100);
  CHECK(multi >= 30);
}
