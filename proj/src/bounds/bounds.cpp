#include "trop/bounds.hpp"

#include <functional>
#include <map>
#include <mutex>
#include <tuple>

#include "trop/wfa.hpp"

namespace trop {

namespace {

using V = BoundsValue;

std::size_t bits(const mpz_class& x) { return x == 0 ? 0 : mpz_sizeinbase(x.get_mpz_t(), 2); }

struct Arith {
  const BoundsMode& mode;

  V clamp(mpz_class r) const {
    if (mode.saturating && r > mode.cap) return V::sat(mode.cap);
    return V::exact(r);
  }
  V num(long x) const { return clamp(mpz_class(x)); }
  V num(const mpz_class& x) const { return clamp(x); }
  V add(const V& a, const V& b) const {
    if (a.saturated || b.saturated) return V::sat(mode.cap);
    return clamp(a.value + b.value);
  }
  V mul(const V& a, const V& b) const {
    if (a.is_zero() || b.is_zero()) return V::exact(0);
    if (a.saturated || b.saturated) return V::sat(mode.cap);
    return clamp(a.value * b.value);
  }
  // a * rest(), with rest skipped when a is zero
  V mul_lazy(const V& a, const std::function<V()>& rest) const {
    if (a.is_zero()) return V::exact(0);
    return mul(a, rest());
  }
  V pow(const V& a, const V& e) const {
    if (e.is_zero()) return V::exact(1);
    if (a.is_zero()) return V::exact(0);
    if (!a.saturated && a.value == 1) return V::exact(1);
    if (a.saturated || e.saturated) return V::sat(mode.cap);
    std::size_t ab = bits(a.value);
    if (mode.saturating) {
      // a >= 2^(ab-1), so a^e >= 2^((ab-1) e)
      if (!e.value.fits_ulong_p() || mpz_class(ab - 1) * e.value > mpz_class(bits(mode.cap)))
        return V::sat(mode.cap);
    } else if (!e.value.fits_ulong_p() || mpz_class(ab) * e.value > mpz_class(mode.max_bits)) {
      throw Error("exact-infeasible: a power of " + std::to_string(ab) + "-bit base with exponent of " +
                  std::to_string(bits(e.value)) + " bits");
    }
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), a.value.get_mpz_t(), e.value.get_ui());
    return clamp(r);
  }
  V ramsey(const V& k, const V& n) const { return pow(k, mul(k, n)); }
};

void out_of_range(const std::string& what) { throw Error("params-out-of-range: " + what); }

mpz_class factorial(int n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

using MemoKey = std::tuple<bool, int, int, int, int, std::string, std::string, std::string>;
std::mutex memo_mutex;
std::map<MemoKey, V> memo;

// the simple (general = false) and general recurrences share one evaluator
class Family {
 public:
  Family(bool general, int n, const mpz_class& w0, V H, const BoundsMode& mode)
      : general_(general), n_(n), w0_(w0), H_(std::move(H)), mode_(mode), ar_{mode_} {
    m_ = ar_.num(mpz_class(n) * factorial(n));
    m2_ = ar_.mul(m_, m_);
  }

  V eval(BoundFn f, int d, int i) {
    if (d < 0 || d > n_) out_of_range("d = " + std::to_string(d) + " outside 0.." + std::to_string(n_));
    if (i < 0 || i > n_ + 1) out_of_range("i = " + std::to_string(i) + " outside 0.." + std::to_string(n_ + 1));
    MemoKey key{general_,   static_cast<int>(f), n_, d, f == BoundFn::MaxWt ? 0 : i, w0_.get_str(),
                general_ ? H_.str() : "", mode_.key()};
    {
      std::lock_guard<std::mutex> lock(memo_mutex);
      auto it = memo.find(key);
      if (it != memo.end()) return it->second;
    }
    V r = compute(f, d, i);
    std::lock_guard<std::mutex> lock(memo_mutex);
    memo.emplace(key, r);
    return r;
  }

 private:
  V compute(BoundFn f, int d, int i) {
    switch (f) {
      case BoundFn::Len:
        if (d == 0) return ar_.num(1);
        if (i == n_ + 1) return ar_.num(0);
        // Len(d, i) = 32 m^2 Len(d-1, 1) Len(d, i+1) (Ramsey(Typ(d, i), 3) + 2)^(2 Amp(d, i) + 1)
        return ar_.mul_lazy(ar_.mul(ar_.mul(ar_.num(32), m2_), eval(BoundFn::Len, d - 1, 1)), [&] {
          return ar_.mul_lazy(eval(BoundFn::Len, d, i + 1), [&] {
            V base = ar_.add(ar_.ramsey(eval(BoundFn::Typ, d, i), ar_.num(3)), ar_.num(2));
            V e = ar_.add(ar_.mul(ar_.num(2), eval(BoundFn::Amp, d, i)), ar_.num(1));
            return ar_.pow(base, e);
          });
        });
      case BoundFn::Cov: {
        if (i == n_) return ar_.num(1);
        if (i > n_) out_of_range("Cov(d, i) needs i <= |S|");
        if (d == 0) out_of_range("Cov(0, i) is only defined at i = |S|");
        // Cov(d, i) = 8 m^2 (MaxWt(d-1) Len(d-1, 1) Len(d, i+1) + Cov(d, i+1) [+ H])
        V prod = ar_.mul_lazy(eval(BoundFn::MaxWt, d - 1, 0), [&] {
          return ar_.mul_lazy(eval(BoundFn::Len, d - 1, 1), [&] { return eval(BoundFn::Len, d, i + 1); });
        });
        V inner = ar_.add(prod, eval(BoundFn::Cov, d, i + 1));
        if (general_) inner = ar_.add(inner, H_);
        return ar_.mul(ar_.mul(ar_.num(8), m2_), inner);
      }
      case BoundFn::MaxWt:
        if (d == 0) return ar_.num(w0_);
        // simple: 2m MaxWt(d-1) Len(d, 1); general: 2m GMaxWt(d-1) GLen(d, 0)
        return ar_.mul_lazy(ar_.mul(ar_.mul(ar_.num(2), m_), eval(BoundFn::MaxWt, d - 1, 0)),
                            [&] { return eval(BoundFn::Len, d, general_ ? 0 : 1); });
      case BoundFn::Amp: {
        if (d == 0) out_of_range("Amp(0, i) is not defined");
        if (i > n_) out_of_range("Amp(d, i) needs i <= |S|");
        // Amp(d, i) = 32 m^2 ([H +] 2 MaxWt(d-1)) (Ramsey(Typ(d, i), 3) + Len(d, i+1) + Len(d-1, 1))
        V w = ar_.mul(ar_.num(2), eval(BoundFn::MaxWt, d - 1, 0));
        if (general_) w = ar_.add(H_, w);
        return ar_.mul_lazy(ar_.mul(ar_.mul(ar_.num(32), m2_), w), [&] {
          return ar_.add(ar_.add(ar_.ramsey(eval(BoundFn::Typ, d, i), ar_.num(3)), eval(BoundFn::Len, d, i + 1)),
                         eval(BoundFn::Len, d - 1, 1));
        });
      }
      case BoundFn::Typ: {
        if (d == 0) out_of_range("Typ(0, i) is not defined");
        // Typ(d, i) = 3^i (2 Cov(d, i) + 2)^(2 |S| i)
        V e = ar_.num(2L * n_ * i);
        V tail = e.is_zero() ? ar_.num(1)
                             : ar_.pow(ar_.add(ar_.mul(ar_.num(2), eval(BoundFn::Cov, d, i)), ar_.num(2)), e);
        return ar_.mul(ar_.pow(ar_.num(3), ar_.num(i)), tail);
      }
    }
    throw Error("unknown bound function");
  }

  bool general_;
  int n_;
  mpz_class w0_;
  V H_;
  BoundsMode mode_;
  Arith ar_;
  V m_, m2_;
};

std::vector<long> small_args(const std::vector<V>& args, std::size_t count, const std::string& name) {
  std::vector<long> r;
  for (std::size_t k = 0; k < count; ++k) {
    if (args[k].saturated || !args[k].value.fits_slong_p() || args[k].value > 1000000)
      out_of_range(name + ": structural argument " + std::to_string(k) + " is not a small integer");
    r.push_back(args[k].value.get_si());
  }
  return r;
}

class Complexity {
 public:
  explicit Complexity(const BoundsMode& mode) : mode_(mode), ar_{mode_} {}

  V k(long n) { return ar_.num(2 * mpz_class(n) * factorial(static_cast<int>(n))); }
  V k2(long n) { return ar_.mul(k(n), k(n)); }

  V W(long n, long d, const V& Ld) {
    if (d < 0) out_of_range("W needs d >= 0");
    if (d == 0) return ar_.num(n);
    return ar_.mul(ar_.mul(k(n), W(n, d - 1, Ld)), Ld);
  }
  V C(long n, long d, long i, const V& Ld, const V& Li) {
    if (i < 0) out_of_range("C needs i >= 0");
    if (i == 0) return ar_.num(1);
    V prod = ar_.mul_lazy(ar_.mul(Ld, Li), [&] { return W(n, d, Ld); });
    return ar_.mul(ar_.mul(ar_.num(8), k2(n)), ar_.add(prod, C(n, d, i - 1, Ld, Li)));
  }
  V T(long n, long d, long i, const V& Ld, const V& Li) {
    if (i < 0) out_of_range("T needs i >= 0");
    V e = ar_.num(2 * n * i);
    V tail = e.is_zero() ? ar_.num(1) : ar_.pow(ar_.add(ar_.mul(ar_.num(2), C(n, d, i, Ld, Li)), ar_.num(2)), e);
    return ar_.mul(ar_.pow(ar_.num(3), ar_.num(i)), tail);
  }
  V A(long n, long d, long i, const V& Ld, const V& Li) {
    if (d < 1) out_of_range("A needs d >= 1 since it reads W(n, d-1, Ld)");
    V r = ar_.mul_lazy(ar_.mul(ar_.num(2), W(n, d - 1, Ld)),
                       [&] { return ar_.ramsey(T(n, d, i, Ld, Li), ar_.num(3)); });
    return ar_.mul(ar_.mul(ar_.num(32), k2(n)), ar_.add(ar_.add(r, Li), Ld));
  }
  V L(long n, long d, long i, const V& Ld, const V& Li) {
    if (i < 0) out_of_range("L needs i >= 0");
    if (i == 0) return ar_.num(0);
    V prod = ar_.mul_lazy(ar_.mul(Ld, Li), [&] { return ar_.ramsey(T(n, d, i, Ld, Li), ar_.num(3)); });
    V e = ar_.add(ar_.mul(ar_.num(2), A(n, d, i, Ld, Li)), ar_.num(1));
    return ar_.mul(ar_.mul(ar_.num(32), k2(n)), ar_.pow(ar_.add(prod, ar_.num(2)), e));
  }
  V Len1(long n, long d, long i, const V& Ld) {
    if (i < 0) out_of_range("Len1 needs i >= 0");
    if (i == 0) return L(n, d, 0, Ld, ar_.num(0));
    return L(n, d, i, Ld, Len1(n, d, i - 1, Ld));
  }
  V Len2(long n, long d) {
    if (d < 1) out_of_range("Len2 needs d >= 1");
    if (d == 1) return Len1(n, 1, n - 1, ar_.num(1));
    return Len1(n, d, n - 1, Len2(n, d - 1));
  }

 private:
  BoundsMode mode_;
  Arith ar_;
};

}  // namespace

std::string BoundsMode::key() const { return saturating ? "sat:" + cap.get_str() : "exact"; }

std::string BoundsValue::str() const { return saturated ? "SAT(" + cap.get_str() + ")" : value.get_str(); }

std::size_t BoundsValue::digits() const {
  if (saturated) return 0;
  return mpz_sizeinbase(value.get_mpz_t(), 10);
}

bool provably_le(const BoundsValue& a, const BoundsValue& b) {
  if (!a.saturated && !b.saturated) return a.value <= b.value;
  if (!a.saturated) return a.value <= b.cap;
  return false;
}

BoundFn bound_fn(const std::string& name) {
  std::string s = name;
  if (s.size() > 1 && s[0] == 'G') s = s.substr(1);
  if (s == "Len") return BoundFn::Len;
  if (s == "Cov") return BoundFn::Cov;
  if (s == "MaxWt") return BoundFn::MaxWt;
  if (s == "Amp") return BoundFn::Amp;
  if (s == "Typ") return BoundFn::Typ;
  throw Error("unknown bound function: " + name);
}

ComplexityFn complexity_fn(const std::string& name) {
  static const std::map<std::string, ComplexityFn> names{
      {"W", ComplexityFn::W},  {"C", ComplexityFn::C},       {"T", ComplexityFn::T},       {"A", ComplexityFn::A},
      {"L", ComplexityFn::L}, {"Len1", ComplexityFn::Len1}, {"Len2", ComplexityFn::Len2}};
  auto it = names.find(name);
  if (it == names.end()) throw Error("unknown complexity function: " + name);
  return it->second;
}

std::string bound_name(BoundFn f, bool general) {
  static const char* names[] = {"Len", "Cov", "MaxWt", "Amp", "Typ"};
  return (general ? "G" : "") + std::string(names[static_cast<int>(f)]);
}

std::string complexity_name(ComplexityFn f) {
  static const char* names[] = {"W", "C", "T", "A", "L", "Len1", "Len2"};
  return names[static_cast<int>(f)];
}

BoundsValue ramsey_bound(const BoundsValue& k, const BoundsValue& n, const BoundsMode& mode) {
  if ((!k.saturated && k.value < 1) || (!n.saturated && n.value < 1))
    throw Error("params-out-of-range: Ramsey bound needs k, n >= 1");
  return Arith{mode}.ramsey(k, n);
}

mpz_class bounds_m(int n) { return mpz_class(n) * factorial(n); }

BoundsValue simp(BoundFn f, const BoundsParams& p, const mpz_class& base_weight) {
  if (p.n < 1) out_of_range("n >= 1");
  return Family(false, p.n, base_weight, V::exact(0), p.mode).eval(f, p.d, p.i);
}

BoundsValue gen(BoundFn f, const BoundsParams& p, const mpz_class& base_weight, const BoundsValue& H) {
  if (p.n < 1) out_of_range("n >= 1");
  return Family(true, p.n, base_weight, H, p.mode).eval(f, p.d, p.i);
}

BoundsValue default_H(int n, const mpz_class& base_weight, const BoundsMode& mode) {
  return simp(BoundFn::Amp, {n, n, 0, mode}, base_weight);
}

BoundsValue main_B(int n, const mpz_class& base_weight, const BoundsMode& mode) {
  return gen(BoundFn::Amp, {n, n, 0, mode}, base_weight, default_H(n, base_weight, mode));
}

BoundsValue complexity_upper(ComplexityFn f, const std::vector<BoundsValue>& args, const BoundsMode& mode) {
  static const std::size_t arity[] = {3, 5, 5, 5, 5, 4, 2};
  static const std::size_t structural[] = {2, 3, 3, 3, 3, 3, 2};
  std::size_t want = arity[static_cast<int>(f)];
  std::string name = complexity_name(f);
  if (args.size() != want)
    throw Error("arity-mismatch: " + name + " takes " + std::to_string(want) + " arguments, got " +
                std::to_string(args.size()));
  auto s = small_args(args, structural[static_cast<int>(f)], name);
  if (s[0] < 1) out_of_range(name + " needs n >= 1");
  Complexity c(mode);
  switch (f) {
    case ComplexityFn::W: return c.W(s[0], s[1], args[2]);
    case ComplexityFn::C: return c.C(s[0], s[1], s[2], args[3], args[4]);
    case ComplexityFn::T: return c.T(s[0], s[1], s[2], args[3], args[4]);
    case ComplexityFn::A: return c.A(s[0], s[1], s[2], args[3], args[4]);
    case ComplexityFn::L: return c.L(s[0], s[1], s[2], args[3], args[4]);
    case ComplexityFn::Len1: return c.Len1(s[0], s[1], s[2], args[3]);
    case ComplexityFn::Len2: return c.Len2(s[0], s[1]);
  }
  throw Error("unknown complexity function");
}

std::string hierarchy_class(ComplexityFn f, bool general) {
  // the general family depends on H, which already sits two levels up
  int level = f == ComplexityFn::Len1 ? 3 : f == ComplexityFn::Len2 ? 4 : 2;
  if (general) level += 2;
  return "F" + std::to_string(level);
}

void clear_bounds_memo() {
  std::lock_guard<std::mutex> lock(memo_mutex);
  memo.clear();
}

}  // namespace trop
