#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ecinfer {

// Bit-vector expression DAG. Nodes are interned in an ExprArena, so
// structural equality is id equality. Widths run 1..64; comparisons and
// boolean connectives produce width-1 nodes.
enum class Op : uint8_t {
  Var,
  Lit,
  Not,   // bitwise complement
  Neg,   // two's-complement negate
  Add,
  Sub,
  Mul,
  And,
  Or,
  Xor,
  Shl,
  Lshr,
  Ashr,
  Eq,
  Ne,
  Ult,
  Ule,
  Ugt,
  Uge,
  Slt,
  Sle,
  Sgt,
  Sge,
  BNot,  // boolean not (width 1)
  BAnd,  // n-ary boolean and
  BOr,   // n-ary boolean or
  Ite,
  Extract,  // hi..lo, inclusive
  Concat,   // first child = high bits
  Zext,
  Sext,
};

using ExprId = uint32_t;
inline constexpr ExprId kNoExpr = 0xffffffffu;

struct ExprNode {
  Op op;
  uint8_t width;
  uint32_t hi = 0;  // Extract hi / Zext,Sext target width
  uint32_t lo = 0;  // Extract lo
  uint64_t value = 0;
  std::string name;
  std::vector<ExprId> kids;
};

struct expr_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Variable assignment used by eval(); values are taken modulo the
// variable's width.
using Assignment = std::map<std::string, uint64_t>;

class ExprArena {
 public:
  ExprArena();

  const ExprNode& node(ExprId id) const { return nodes_[id]; }
  size_t size() const { return nodes_.size(); }

  ExprId var(std::string_view name, unsigned width);
  ExprId lit(uint64_t value, unsigned width);
  ExprId tru() { return true_; }
  ExprId fals() { return false_; }

  ExprId un(Op op, ExprId a);                 // Not, Neg, BNot
  ExprId bin(Op op, ExprId a, ExprId b);      // arithmetic, shifts, comparisons
  ExprId band(std::vector<ExprId> kids);      // flattens, width-1 operands
  ExprId bor(std::vector<ExprId> kids);
  ExprId bnot(ExprId a) { return un(Op::BNot, a); }
  ExprId ite(ExprId cond, ExprId a, ExprId b);
  ExprId extract(ExprId a, unsigned hi, unsigned lo);
  ExprId concat(ExprId hi, ExprId lo);
  ExprId zext(ExprId a, unsigned to_width);
  ExprId sext(ExprId a, unsigned to_width);

  unsigned width(ExprId id) const { return nodes_[id].width; }
  bool is_lit(ExprId id) const { return nodes_[id].op == Op::Lit; }
  bool is_true(ExprId id) const { return id == true_; }
  bool is_false(ExprId id) const { return id == false_; }

  uint64_t eval(ExprId id, const Assignment& env) const;

  // Free variables with their widths, sorted by name.
  std::vector<std::pair<std::string, unsigned>> free_vars(ExprId id) const;

  size_t node_count(ExprId id) const;  // distinct DAG nodes reachable

  // Canonical machine-readable form, loss-free: "(ult (var pin 16) (lit 0x540 16))".
  std::string to_sexpr(ExprId id) const;
  ExprId parse_sexpr(std::string_view text);

  // Human-oriented infix form used by reports: "0x540 < pin", "p1[28:20] .. 0x0".
  std::string display(ExprId id) const;
  std::string display(ExprId id, const std::map<uint64_t, std::string>& name_map) const;

 private:
  ExprId intern(ExprNode n);
  void display_rec(ExprId id, int parent_prec, std::string& out,
                   const std::map<uint64_t, std::string>* name_map) const;

  std::vector<ExprNode> nodes_;
  std::unordered_map<std::string, ExprId> intern_;
  ExprId true_ = kNoExpr;
  ExprId false_ = kNoExpr;
};

inline uint64_t mask_width(unsigned width) {
  return width >= 64 ? ~0ull : ((1ull << width) - 1);
}

// Sign-extend a width-bit value to 64 bits (two's complement).
inline int64_t to_signed(uint64_t v, unsigned width) {
  if (width >= 64) return static_cast<int64_t>(v);
  uint64_t sign = 1ull << (width - 1);
  return static_cast<int64_t>((v ^ sign) - sign);
}

// Semantics-preserving canonicalization: constant folding, identity
// elimination, commutative operand ordering. Idempotent.
ExprId normalize(ExprArena& a, ExprId e);

}  // namespace ecinfer
