#pragma once

#include <random>
#include <string>
#include <vector>

#include "qrr/qdsl.hpp"

namespace qrr::testing {

using namespace qrr::dsl;

// Random trees over the whole grammar.
class Gen {
 public:
  explicit Gen(unsigned seed) : rng_(seed) {}

  ExprPtr expr(int depth, std::vector<std::string> scope) {
    const int pick = depth <= 0 ? uniform(0, 2) : uniform(0, 12);
    switch (pick) {
      case 0: return integer(uniform(0, 30));
      case 1: return qvar();
      case 2: return scope.empty() ? qvar() : var(scope[uniform(0, static_cast<int>(scope.size()) - 1)]);
      case 3: return pow(expr(depth - 1, scope), poly(scope));
      case 4: return poch(expr(depth - 1, scope), expr(depth - 1, scope), uniform(0, 2) ? expr(depth - 1, scope) : nullptr);
      case 5: {
        const std::string v = fresh();
        ExprPtr lo = expr(depth - 1, scope);
        ExprPtr hi = uniform(0, 1) ? expr(depth - 1, scope) : nullptr;
        scope.push_back(v);
        return sum(v, lo, hi, expr(depth - 1, scope));
      }
      case 6: {
        const std::string v = fresh();
        scope.push_back(v);
        return bisum(v, expr(depth - 1, scope));
      }
      case 7: {
        const std::string v = fresh();
        ExprPtr lo = expr(depth - 1, scope);
        scope.push_back(v);
        return prod(v, lo, expr(depth - 1, scope));
      }
      case 8: return add(expr(depth - 1, scope), expr(depth - 1, scope));
      case 9: return sub(expr(depth - 1, scope), expr(depth - 1, scope));
      case 10: return mul(expr(depth - 1, scope), expr(depth - 1, scope));
      case 11: return div(expr(depth - 1, scope), expr(depth - 1, scope));
      default: return neg(expr(depth - 1, scope));
    }
  }

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

 private:
  Poly poly(const std::vector<std::string>& scope) {
    Poly p(Rational(uniform(-3, 6)));
    if (scope.empty()) return p;
    const int terms = uniform(0, 3);
    for (int i = 0; i < terms; ++i) {
      const std::string& a = scope[uniform(0, static_cast<int>(scope.size()) - 1)];
      const std::string& b = scope[uniform(0, static_cast<int>(scope.size()) - 1)];
      Poly t(Rational(uniform(-4, 4)));
      t = t * Poly::var(a);
      if (uniform(0, 1)) t = t * Poly::var(b);
      p = p + t;
    }
    if (uniform(0, 4) == 0) p = p.scaled(Rational(1, 2));
    return p;
  }

  std::string fresh() {
    static const char* names[] = {"n", "m", "r", "k", "j", "x1", "idx"};
    return names[uniform(0, 6)];
  }

  std::mt19937 rng_;
};

}  // namespace qrr::testing
