#include <algorithm>
#include <functional>
#include <unordered_map>

#include "ecinfer/symexpr.hpp"

// Pre-solver canonicalization: constant folding, neutral/annihilator
// elimination, canonical operand order for commutative operators, and
// width-bookkeeping folds (extract-of-extract, extract-of-zext, ...).
// Readability rewrites (Table-style rules) live in simplify.cpp; this
// pass only establishes the canonical form they match against.

namespace ecinfer {

namespace {

bool commutative(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Mul:
    case Op::And:
    case Op::Or:
    case Op::Xor:
    case Op::Eq:
    case Op::Ne:
      return true;
    default:
      return false;
  }
}

struct Normalizer {
  ExprArena& a;
  std::unordered_map<ExprId, ExprId> memo;

  const ExprNode& n(ExprId e) const { return a.node(e); }
  bool lit(ExprId e, uint64_t v) const { return n(e).op == Op::Lit && n(e).value == v; }
  bool is_lit(ExprId e) const { return n(e).op == Op::Lit; }
  uint64_t val(ExprId e) const { return n(e).value; }

  ExprId run(ExprId e) {
    auto it = memo.find(e);
    if (it != memo.end()) return it->second;
    const ExprNode node = n(e);
    ExprId r;
    switch (node.op) {
      case Op::Var:
      case Op::Lit:
        r = e;
        break;
      case Op::BAnd: {
        std::vector<ExprId> kids;
        bool short_circuit = false;
        for (ExprId k : node.kids) {
          ExprId nk = run(k);
          if (a.is_false(nk)) {
            short_circuit = true;
            break;
          }
          if (!a.is_true(nk)) kids.push_back(nk);
        }
        if (short_circuit) {
          r = a.fals();
          break;
        }
        r = a.band(kids);
        r = complement_check(r, /*conj=*/true);
        break;
      }
      case Op::BOr: {
        std::vector<ExprId> kids;
        bool short_circuit = false;
        for (ExprId k : node.kids) {
          ExprId nk = run(k);
          if (a.is_true(nk)) {
            short_circuit = true;
            break;
          }
          if (!a.is_false(nk)) kids.push_back(nk);
        }
        if (short_circuit) {
          r = a.tru();
          break;
        }
        r = a.bor(kids);
        r = complement_check(r, /*conj=*/false);
        break;
      }
      default: {
        std::vector<ExprId> kids;
        kids.reserve(node.kids.size());
        for (ExprId k : node.kids) kids.push_back(run(k));
        r = rebuild(node, kids);
        r = local(r);
        break;
      }
    }
    memo.emplace(e, r);
    return r;
  }

  // x AND !x -> false; x OR !x -> true (flat kid lists only)
  ExprId complement_check(ExprId e, bool conj) {
    const ExprNode& node = n(e);
    if (node.op != (conj ? Op::BAnd : Op::BOr)) return e;
    for (ExprId k : node.kids) {
      if (n(k).op == Op::BNot) {
        ExprId inner = n(k).kids[0];
        if (std::find(node.kids.begin(), node.kids.end(), inner) != node.kids.end())
          return conj ? a.fals() : a.tru();
      }
    }
    return e;
  }

  ExprId rebuild(const ExprNode& node, const std::vector<ExprId>& kids) {
    switch (node.op) {
      case Op::Not:
      case Op::Neg:
      case Op::BNot:
        return a.un(node.op, kids[0]);
      case Op::Ite:
        return a.ite(kids[0], kids[1], kids[2]);
      case Op::Extract:
        return a.extract(kids[0], node.hi, node.lo);
      case Op::Concat:
        return a.concat(kids[0], kids[1]);
      case Op::Zext:
        return a.zext(kids[0], node.hi);
      case Op::Sext:
        return a.sext(kids[0], node.hi);
      default: {
        ExprId x = kids[0], y = kids[1];
        if (commutative(node.op) && y < x) std::swap(x, y);
        return a.bin(node.op, x, y);
      }
    }
  }

  ExprId fold_unary(Op op, ExprId k, unsigned w) {
    uint64_t m = mask_width(w);
    switch (op) {
      case Op::Not: return a.lit(~val(k) & m, w);
      case Op::BNot: return a.lit((~val(k)) & 1, 1);
      case Op::Neg: return a.lit((~val(k) + 1) & m, w);
      default: return kNoExpr;
    }
  }

  ExprId local(ExprId e) {
    const ExprNode& node = n(e);
    unsigned w = node.width;
    switch (node.op) {
      case Op::Not:
      case Op::Neg:
      case Op::BNot: {
        ExprId k = node.kids[0];
        if (is_lit(k)) return fold_unary(node.op, k, w);
        return e;
      }
      case Op::Ite: {
        ExprId c = node.kids[0], x = node.kids[1], y = node.kids[2];
        if (a.is_true(c)) return x;
        if (a.is_false(c)) return y;
        if (x == y) return x;
        if (w == 1 && lit(x, 1) && lit(y, 0)) return c;
        if (w == 1 && lit(x, 0) && lit(y, 1)) return run(a.bnot(c));
        if (n(c).op == Op::BNot) return run(a.ite(n(c).kids[0], y, x));
        return e;
      }
      case Op::Extract: {
        ExprId k = node.kids[0];
        unsigned hi = node.hi, lo = node.lo;
        if (hi == n(k).width - 1 && lo == 0) return k;
        if (is_lit(k)) return a.lit((val(k) >> lo) & mask_width(w), w);
        if (n(k).op == Op::Extract)
          return run(a.extract(n(k).kids[0], n(k).lo + hi, n(k).lo + lo));
        if (n(k).op == Op::Zext) {
          unsigned sw = n(n(k).kids[0]).width;
          if (hi < sw) return run(a.extract(n(k).kids[0], hi, lo));
          if (lo >= sw) return a.lit(0, w);
          return run(a.zext(a.extract(n(k).kids[0], sw - 1, lo), w));
        }
        if (n(k).op == Op::Concat) {
          unsigned wlo = n(n(k).kids[1]).width;
          if (hi < wlo) return run(a.extract(n(k).kids[1], hi, lo));
          if (lo >= wlo) return run(a.extract(n(k).kids[0], hi - wlo, lo - wlo));
        }
        return e;
      }
      case Op::Concat: {
        ExprId x = node.kids[0], y = node.kids[1];
        if (is_lit(x) && is_lit(y))
          return a.lit((val(x) << n(y).width) | val(y), w);
        // adjacent slices of the same base re-fuse
        if (n(x).op == Op::Extract && n(y).op == Op::Extract &&
            n(x).kids[0] == n(y).kids[0] && n(x).lo == n(y).hi + 1)
          return run(a.extract(n(x).kids[0], n(x).hi, n(y).lo));
        return e;
      }
      case Op::Zext: {
        ExprId k = node.kids[0];
        if (is_lit(k)) return a.lit(val(k), w);
        if (n(k).op == Op::Zext) return run(a.zext(n(k).kids[0], w));
        return e;
      }
      case Op::Sext: {
        ExprId k = node.kids[0];
        if (is_lit(k))
          return a.lit(static_cast<uint64_t>(to_signed(val(k), n(k).width)) & mask_width(w), w);
        return e;
      }
      default:
        return binary_local(e);
    }
  }

  ExprId binary_local(ExprId e) {
    const ExprNode& node = n(e);
    ExprId x = node.kids[0], y = node.kids[1];
    unsigned w = node.width;
    unsigned opw = n(x).width;
    uint64_t m = mask_width(opw);

    if (is_lit(x) && is_lit(y)) {
      Assignment empty;
      return a.lit(a.eval(e, empty), w);
    }

    switch (node.op) {
      case Op::Add:
        if (lit(x, 0)) return y;
        if (lit(y, 0)) return x;
        break;
      case Op::Sub:
        if (lit(y, 0)) return x;
        if (x == y) return a.lit(0, w);
        if (lit(x, 0)) return run(a.un(Op::Neg, y));
        break;
      case Op::Mul:
        if (lit(x, 0) || lit(y, 0)) return a.lit(0, w);
        if (lit(x, 1)) return y;
        if (lit(y, 1)) return x;
        break;
      case Op::And:
        if (lit(x, 0) || lit(y, 0)) return a.lit(0, w);
        if (lit(x, m)) return y;
        if (lit(y, m)) return x;
        if (x == y) return x;
        break;
      case Op::Or:
        if (lit(x, m)) return x;
        if (lit(y, m)) return y;
        if (lit(x, 0)) return y;
        if (lit(y, 0)) return x;
        if (x == y) return x;
        break;
      case Op::Xor:
        if (x == y) return a.lit(0, w);
        if (lit(x, 0)) return y;
        if (lit(y, 0)) return x;
        break;
      case Op::Shl:
      case Op::Lshr:
        if (lit(y, 0)) return x;
        if (lit(x, 0)) return a.lit(0, w);
        if (is_lit(y) && val(y) >= w) return a.lit(0, w);
        break;
      case Op::Ashr:
        if (lit(y, 0)) return x;
        if (is_lit(y) && val(y) >= w) return run(a.bin(Op::Ashr, x, a.lit(w - 1, w)));
        break;
      case Op::Eq: {
        if (x == y) return a.tru();
        ExprId bt = bool_cmp(x, y, /*eq=*/true);
        if (bt != kNoExpr) return bt;
        ExprId zt = zext_cmp(e, x, y);
        if (zt != kNoExpr) return zt;
        break;
      }
      case Op::Ne: {
        if (x == y) return a.fals();
        ExprId bt = bool_cmp(x, y, /*eq=*/false);
        if (bt != kNoExpr) return bt;
        ExprId bit = bit_test(x, y);
        if (bit != kNoExpr) return bit;
        ExprId zt = zext_cmp(e, x, y);
        if (zt != kNoExpr) return zt;
        break;
      }
      case Op::Ult:
        if (x == y) return a.fals();
        if (lit(y, 0)) return a.fals();
        if (lit(x, m)) return a.fals();
        break;
      case Op::Ule:
        if (x == y) return a.tru();
        if (lit(x, 0)) return a.tru();
        if (lit(y, m)) return a.tru();
        break;
      case Op::Ugt:
        if (x == y) return a.fals();
        if (lit(x, 0)) return a.fals();
        if (lit(y, m)) return a.fals();
        break;
      case Op::Uge:
        if (x == y) return a.tru();
        if (lit(y, 0)) return a.tru();
        if (lit(x, m)) return a.tru();
        break;
      case Op::Slt:
        if (x == y) return a.fals();
        break;
      case Op::Sle:
      case Op::Sge:
        if (x == y) return a.tru();
        break;
      case Op::Sgt:
        if (x == y) return a.fals();
        break;
      default:
        break;
    }
    return e;
  }

  // eq/ne against a width-1 value collapses to the value or its negation.
  ExprId bool_cmp(ExprId x, ExprId y, bool eq) {
    if (n(x).width != 1) return kNoExpr;
    ExprId v = kNoExpr;
    bool truthy = false;
    if (is_lit(x)) {
      v = y;
      truthy = val(x) == 1;
    } else if (is_lit(y)) {
      v = x;
      truthy = val(y) == 1;
    } else {
      return kNoExpr;
    }
    if (truthy == eq) return v;
    return run(a.bnot(v));
  }

  // (x & 2^i) != 0 and friends canonicalize to the single bit x[i:i].
  ExprId bit_test(ExprId x, ExprId y) {
    ExprId andside = kNoExpr, litside = kNoExpr;
    if (n(x).op == Op::And && lit(y, 0)) {
      andside = x;
      litside = y;
    } else if (n(y).op == Op::And && lit(x, 0)) {
      andside = y;
      litside = x;
    }
    if (andside == kNoExpr) return kNoExpr;
    (void)litside;
    ExprId va = n(andside).kids[0], vm = n(andside).kids[1];
    if (!is_lit(vm)) std::swap(va, vm);
    if (!is_lit(vm)) return kNoExpr;
    uint64_t mval = val(vm);
    if (mval == 0 || (mval & (mval - 1)) != 0) return kNoExpr;
    unsigned bit = 0;
    while (!((mval >> bit) & 1)) bit++;
    return run(a.extract(va, bit, bit));
  }

  // eq/ne(zext(v), lit) drops the extension when the literal fits.
  ExprId zext_cmp(ExprId e, ExprId x, ExprId y) {
    const ExprNode& node = n(e);
    ExprId z = kNoExpr, c = kNoExpr;
    if (n(x).op == Op::Zext && is_lit(y)) {
      z = x;
      c = y;
    } else if (n(y).op == Op::Zext && is_lit(x)) {
      z = y;
      c = x;
    }
    if (z == kNoExpr) return kNoExpr;
    ExprId inner = n(z).kids[0];
    unsigned iw = n(inner).width;
    if (val(c) > mask_width(iw)) return node.op == Op::Eq ? a.fals() : a.tru();
    return run(a.bin(node.op, inner, a.lit(val(c), iw)));
  }
};

}  // namespace

ExprId normalize(ExprArena& a, ExprId e) {
  Normalizer nm{a};
  return nm.run(e);
}

}  // namespace ecinfer
