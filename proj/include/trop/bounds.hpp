// bounds.hpp
#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace trop {

struct BoundsMode {
  bool saturating = false;
  mpz_class cap;                     // saturating: values above cap become Saturated(cap)
  std::size_t max_bits = 1u << 26;  // exact: larger powers throw exact-infeasible
  static BoundsMode exact() { return {}; }
  static BoundsMode saturated(const mpz_class& cap) { return {true, cap}; }
  std::string key() const;
};

struct BoundsValue {
  mpz_class value;  // exact value; unused when saturated
  bool saturated = false;
  mpz_class cap;
  static BoundsValue exact(const mpz_class& v) { return {v, false, 0}; }
  static BoundsValue sat(const mpz_class& cap) { return {0, true, cap}; }
  bool is_zero() const { return !saturated && value == 0; }
  std::string str() const;  // decimal or SAT(cap)
  std::size_t digits() const;
  bool operator==(const BoundsValue& o) const {
    return saturated == o.saturated && (saturated ? cap == o.cap : value == o.value);
  }
};

// a <= b, where Saturated(cap) stands for some value above cap; false when undecidable
bool provably_le(const BoundsValue& a, const BoundsValue& b);

struct BoundsParams {
  int n = 1;  // |S|
  int d = 0;
  int i = 0;
  BoundsMode mode;
};

enum class BoundFn { Len, Cov, MaxWt, Amp, Typ };
enum class ComplexityFn { W, C, T, A, L, Len1, Len2 };

BoundFn bound_fn(const std::string& name);
ComplexityFn complexity_fn(const std::string& name);
std::string bound_name(BoundFn f, bool general);
std::string complexity_name(ComplexityFn f);

// k^(k n)
BoundsValue ramsey_bound(const BoundsValue& k, const BoundsValue& n, const BoundsMode& mode);
// the stabilisation constant n n!
mpz_class bounds_m(int n);

// errors: params-out-of-range, exact-infeasible
BoundsValue simp(BoundFn f, const BoundsParams& p, const mpz_class& base_weight);
BoundsValue gen(BoundFn f, const BoundsParams& p, const mpz_class& base_weight, const BoundsValue& H);
// H = Amp(n, 0)
BoundsValue default_H(int n, const mpz_class& base_weight, const BoundsMode& mode);
// GAmp(n, 0) with the default H
BoundsValue main_B(int n, const mpz_class& base_weight, const BoundsMode& mode);

// errors: arity-mismatch, params-out-of-range, exact-infeasible
BoundsValue complexity_upper(ComplexityFn f, const std::vector<BoundsValue>& args, const BoundsMode& mode);
// the fast-growing class the analysis places the function in, as a label only
std::string hierarchy_class(ComplexityFn f, bool general);

void clear_bounds_memo();

}  // namespace trop
