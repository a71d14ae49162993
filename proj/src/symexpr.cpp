#include "ecinfer/symexpr.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

namespace ecinfer {

namespace {

const char* op_name(Op op) {
  switch (op) {
    case Op::Var: return "var";
    case Op::Lit: return "lit";
    case Op::Not: return "not";
    case Op::Neg: return "neg";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Xor: return "xor";
    case Op::Shl: return "shl";
    case Op::Lshr: return "lshr";
    case Op::Ashr: return "ashr";
    case Op::Eq: return "eq";
    case Op::Ne: return "ne";
    case Op::Ult: return "ult";
    case Op::Ule: return "ule";
    case Op::Ugt: return "ugt";
    case Op::Uge: return "uge";
    case Op::Slt: return "slt";
    case Op::Sle: return "sle";
    case Op::Sgt: return "sgt";
    case Op::Sge: return "sge";
    case Op::BNot: return "bnot";
    case Op::BAnd: return "band";
    case Op::BOr: return "bor";
    case Op::Ite: return "ite";
    case Op::Extract: return "extract";
    case Op::Concat: return "concat";
    case Op::Zext: return "zext";
    case Op::Sext: return "sext";
  }
  return "?";
}

bool is_cmp(Op op) {
  switch (op) {
    case Op::Eq:
    case Op::Ne:
    case Op::Ult:
    case Op::Ule:
    case Op::Ugt:
    case Op::Uge:
    case Op::Slt:
    case Op::Sle:
    case Op::Sgt:
    case Op::Sge:
      return true;
    default:
      return false;
  }
}

std::string hex(uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

ExprArena::ExprArena() {
  true_ = lit(1, 1);
  false_ = lit(0, 1);
}

ExprId ExprArena::intern(ExprNode n) {
  // Structural key; var names and literal values included.
  std::string key;
  key.reserve(16 + n.kids.size() * 11);
  key += char(static_cast<uint8_t>(n.op));
  key += char(n.width);
  key += std::to_string(n.hi);
  key += ',';
  key += std::to_string(n.lo);
  key += ',';
  key += std::to_string(n.value);
  key += ',';
  key += n.name;
  for (ExprId k : n.kids) {
    key += ':';
    key += std::to_string(k);
  }
  auto it = intern_.find(key);
  if (it != intern_.end()) return it->second;
  ExprId id = static_cast<ExprId>(nodes_.size());
  nodes_.push_back(std::move(n));
  intern_.emplace(std::move(key), id);
  return id;
}

ExprId ExprArena::var(std::string_view name, unsigned width) {
  if (width < 1 || width > 64) throw expr_error("variable width out of range: " + std::string(name));
  ExprNode n;
  n.op = Op::Var;
  n.width = static_cast<uint8_t>(width);
  n.name = std::string(name);
  return intern(std::move(n));
}

ExprId ExprArena::lit(uint64_t value, unsigned width) {
  if (width < 1 || width > 64) throw expr_error("literal width out of range");
  ExprNode n;
  n.op = Op::Lit;
  n.width = static_cast<uint8_t>(width);
  n.value = value & mask_width(width);
  return intern(std::move(n));
}

ExprId ExprArena::un(Op op, ExprId a) {
  const ExprNode& na = nodes_[a];
  if (op == Op::BNot && na.width != 1) throw expr_error("bnot needs width-1 operand");
  if ((op == Op::Not || op == Op::Neg) && na.width == 1 && op == Op::Not)
    op = Op::BNot;  // width-1 complement is boolean not
  ExprNode n;
  n.op = op;
  n.width = na.width;
  n.kids = {a};
  return intern(std::move(n));
}

ExprId ExprArena::bin(Op op, ExprId a, ExprId b) {
  const ExprNode& na = nodes_[a];
  const ExprNode& nb = nodes_[b];
  if (na.width != nb.width)
    throw expr_error(std::string("width mismatch in ") + op_name(op) + ": " +
                     std::to_string(na.width) + " vs " + std::to_string(nb.width));
  if (op == Op::And && na.width == 1) return band({a, b});
  if (op == Op::Or && na.width == 1) return bor({a, b});
  ExprNode n;
  n.op = op;
  n.width = is_cmp(op) ? 1 : na.width;
  n.kids = {a, b};
  return intern(std::move(n));
}

ExprId ExprArena::band(std::vector<ExprId> kids) {
  std::vector<ExprId> flat;
  for (ExprId k : kids) {
    if (nodes_[k].width != 1) throw expr_error("band operand not width 1");
    if (nodes_[k].op == Op::BAnd) {
      for (ExprId kk : nodes_[k].kids) flat.push_back(kk);
    } else {
      flat.push_back(k);
    }
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.empty()) return true_;
  if (flat.size() == 1) return flat[0];
  ExprNode n;
  n.op = Op::BAnd;
  n.width = 1;
  n.kids = std::move(flat);
  return intern(std::move(n));
}

ExprId ExprArena::bor(std::vector<ExprId> kids) {
  std::vector<ExprId> flat;
  for (ExprId k : kids) {
    if (nodes_[k].width != 1) throw expr_error("bor operand not width 1");
    if (nodes_[k].op == Op::BOr) {
      for (ExprId kk : nodes_[k].kids) flat.push_back(kk);
    } else {
      flat.push_back(k);
    }
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.empty()) return false_;
  if (flat.size() == 1) return flat[0];
  ExprNode n;
  n.op = Op::BOr;
  n.width = 1;
  n.kids = std::move(flat);
  return intern(std::move(n));
}

ExprId ExprArena::ite(ExprId cond, ExprId a, ExprId b) {
  if (nodes_[cond].width != 1) throw expr_error("ite condition not width 1");
  if (nodes_[a].width != nodes_[b].width) throw expr_error("ite arm width mismatch");
  ExprNode n;
  n.op = Op::Ite;
  n.width = nodes_[a].width;
  n.kids = {cond, a, b};
  return intern(std::move(n));
}

ExprId ExprArena::extract(ExprId a, unsigned hi, unsigned lo) {
  const ExprNode& na = nodes_[a];
  if (hi < lo || hi >= na.width) throw expr_error("extract range out of bounds");
  ExprNode n;
  n.op = Op::Extract;
  n.width = static_cast<uint8_t>(hi - lo + 1);
  n.hi = hi;
  n.lo = lo;
  n.kids = {a};
  return intern(std::move(n));
}

ExprId ExprArena::concat(ExprId hi, ExprId lo) {
  unsigned w = nodes_[hi].width + nodes_[lo].width;
  if (w > 64) throw expr_error("concat width exceeds 64");
  ExprNode n;
  n.op = Op::Concat;
  n.width = static_cast<uint8_t>(w);
  n.kids = {hi, lo};
  return intern(std::move(n));
}

ExprId ExprArena::zext(ExprId a, unsigned to_width) {
  const ExprNode& na = nodes_[a];
  if (to_width < na.width || to_width > 64) throw expr_error("zext target width invalid");
  if (to_width == na.width) return a;
  ExprNode n;
  n.op = Op::Zext;
  n.width = static_cast<uint8_t>(to_width);
  n.hi = to_width;
  n.kids = {a};
  return intern(std::move(n));
}

ExprId ExprArena::sext(ExprId a, unsigned to_width) {
  const ExprNode& na = nodes_[a];
  if (to_width < na.width || to_width > 64) throw expr_error("sext target width invalid");
  if (to_width == na.width) return a;
  ExprNode n;
  n.op = Op::Sext;
  n.width = static_cast<uint8_t>(to_width);
  n.hi = to_width;
  n.kids = {a};
  return intern(std::move(n));
}

uint64_t ExprArena::eval(ExprId id, const Assignment& env) const {
  std::unordered_map<ExprId, uint64_t> memo;
  std::function<uint64_t(ExprId)> go = [&](ExprId e) -> uint64_t {
    auto it = memo.find(e);
    if (it != memo.end()) return it->second;
    const ExprNode& n = nodes_[e];
    uint64_t m = mask_width(n.width);
    uint64_t r = 0;
    switch (n.op) {
      case Op::Var: {
        auto v = env.find(n.name);
        if (v == env.end()) throw expr_error("eval: unbound variable " + n.name);
        r = v->second & m;
        break;
      }
      case Op::Lit: r = n.value; break;
      case Op::Not: r = ~go(n.kids[0]) & m; break;
      case Op::BNot: r = (~go(n.kids[0]) & 1); break;
      case Op::Neg: r = (~go(n.kids[0]) + 1) & m; break;
      case Op::Add: r = (go(n.kids[0]) + go(n.kids[1])) & m; break;
      case Op::Sub: r = (go(n.kids[0]) - go(n.kids[1])) & m; break;
      case Op::Mul: r = (go(n.kids[0]) * go(n.kids[1])) & m; break;
      case Op::And: r = go(n.kids[0]) & go(n.kids[1]); break;
      case Op::Or: r = go(n.kids[0]) | go(n.kids[1]); break;
      case Op::Xor: r = go(n.kids[0]) ^ go(n.kids[1]); break;
      case Op::Shl: {
        uint64_t s = go(n.kids[1]);
        r = s >= n.width ? 0 : (go(n.kids[0]) << s) & m;
        break;
      }
      case Op::Lshr: {
        uint64_t s = go(n.kids[1]);
        r = s >= n.width ? 0 : go(n.kids[0]) >> s;
        break;
      }
      case Op::Ashr: {
        uint64_t s = go(n.kids[1]);
        unsigned w = nodes_[n.kids[0]].width;
        int64_t v = to_signed(go(n.kids[0]), w);
        if (s >= w) s = w - 1;
        r = static_cast<uint64_t>(v >> s) & m;
        break;
      }
      case Op::Eq: r = go(n.kids[0]) == go(n.kids[1]); break;
      case Op::Ne: r = go(n.kids[0]) != go(n.kids[1]); break;
      case Op::Ult: r = go(n.kids[0]) < go(n.kids[1]); break;
      case Op::Ule: r = go(n.kids[0]) <= go(n.kids[1]); break;
      case Op::Ugt: r = go(n.kids[0]) > go(n.kids[1]); break;
      case Op::Uge: r = go(n.kids[0]) >= go(n.kids[1]); break;
      case Op::Slt:
      case Op::Sle:
      case Op::Sgt:
      case Op::Sge: {
        unsigned w = nodes_[n.kids[0]].width;
        int64_t a = to_signed(go(n.kids[0]), w);
        int64_t b = to_signed(go(n.kids[1]), w);
        r = n.op == Op::Slt ? a < b : n.op == Op::Sle ? a <= b : n.op == Op::Sgt ? a > b : a >= b;
        break;
      }
      case Op::BAnd: {
        r = 1;
        for (ExprId k : n.kids) r &= go(k);
        break;
      }
      case Op::BOr: {
        r = 0;
        for (ExprId k : n.kids) r |= go(k);
        break;
      }
      case Op::Ite: r = go(n.kids[0]) ? go(n.kids[1]) : go(n.kids[2]); break;
      case Op::Extract: r = (go(n.kids[0]) >> n.lo) & m; break;
      case Op::Concat: r = (go(n.kids[0]) << nodes_[n.kids[1]].width) | go(n.kids[1]); break;
      case Op::Zext: r = go(n.kids[0]); break;
      case Op::Sext: {
        unsigned w = nodes_[n.kids[0]].width;
        r = static_cast<uint64_t>(to_signed(go(n.kids[0]), w)) & m;
        break;
      }
    }
    memo.emplace(e, r);
    return r;
  };
  return go(id);
}

std::vector<std::pair<std::string, unsigned>> ExprArena::free_vars(ExprId id) const {
  std::map<std::string, unsigned> acc;
  std::set<ExprId> seen;
  std::function<void(ExprId)> go = [&](ExprId e) {
    if (!seen.insert(e).second) return;
    const ExprNode& n = nodes_[e];
    if (n.op == Op::Var) acc[n.name] = n.width;
    for (ExprId k : n.kids) go(k);
  };
  go(id);
  return {acc.begin(), acc.end()};
}

size_t ExprArena::node_count(ExprId id) const {
  std::set<ExprId> seen;
  std::function<void(ExprId)> go = [&](ExprId e) {
    if (!seen.insert(e).second) return;
    for (ExprId k : nodes_[e].kids) go(k);
  };
  go(id);
  return seen.size();
}

std::string ExprArena::to_sexpr(ExprId id) const {
  const ExprNode& n = nodes_[id];
  switch (n.op) {
    case Op::Var:
      return "(var " + n.name + " " + std::to_string(n.width) + ")";
    case Op::Lit:
      return "(lit " + hex(n.value) + " " + std::to_string(n.width) + ")";
    case Op::Extract:
      return "(extract " + std::to_string(n.hi) + " " + std::to_string(n.lo) + " " +
             to_sexpr(n.kids[0]) + ")";
    case Op::Zext:
    case Op::Sext:
      return std::string("(") + op_name(n.op) + " " + std::to_string(n.hi) + " " +
             to_sexpr(n.kids[0]) + ")";
    default: {
      std::string s = "(";
      s += op_name(n.op);
      for (ExprId k : n.kids) {
        s += ' ';
        s += to_sexpr(k);
      }
      s += ')';
      return s;
    }
  }
}

namespace {

struct SexprCursor {
  std::string_view text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\n' || text[pos] == '\t')) pos++;
  }
  char peek() {
    skip_ws();
    if (pos >= text.size()) throw expr_error("sexpr: unexpected end of input");
    return text[pos];
  }
  void expect(char c) {
    if (peek() != c) throw expr_error(std::string("sexpr: expected '") + c + "'");
    pos++;
  }
  std::string token() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size() && text[pos] != ' ' && text[pos] != '(' && text[pos] != ')' &&
           text[pos] != '\n' && text[pos] != '\t')
      pos++;
    if (start == pos) throw expr_error("sexpr: empty token");
    return std::string(text.substr(start, pos - start));
  }
};

uint64_t parse_u64(const std::string& tok) {
  try {
    return std::stoull(tok, nullptr, 0);
  } catch (const std::exception&) {
    throw expr_error("sexpr: bad number '" + tok + "'");
  }
}

}  // namespace

ExprId ExprArena::parse_sexpr(std::string_view text) {
  SexprCursor cur{text};
  std::function<ExprId()> go = [&]() -> ExprId {
    cur.expect('(');
    std::string op = cur.token();
    ExprId result;
    if (op == "var") {
      std::string name = cur.token();
      unsigned w = static_cast<unsigned>(parse_u64(cur.token()));
      result = var(name, w);
    } else if (op == "lit") {
      uint64_t v = parse_u64(cur.token());
      unsigned w = static_cast<unsigned>(parse_u64(cur.token()));
      result = lit(v, w);
    } else if (op == "extract") {
      unsigned hi = static_cast<unsigned>(parse_u64(cur.token()));
      unsigned lo = static_cast<unsigned>(parse_u64(cur.token()));
      ExprId a = go();
      result = extract(a, hi, lo);
    } else if (op == "zext" || op == "sext") {
      unsigned w = static_cast<unsigned>(parse_u64(cur.token()));
      ExprId a = go();
      result = op == "zext" ? zext(a, w) : sext(a, w);
    } else {
      static const std::map<std::string, Op> kOps = {
          {"not", Op::Not},   {"neg", Op::Neg},   {"add", Op::Add},   {"sub", Op::Sub},
          {"mul", Op::Mul},   {"and", Op::And},   {"or", Op::Or},     {"xor", Op::Xor},
          {"shl", Op::Shl},   {"lshr", Op::Lshr}, {"ashr", Op::Ashr}, {"eq", Op::Eq},
          {"ne", Op::Ne},     {"ult", Op::Ult},   {"ule", Op::Ule},   {"ugt", Op::Ugt},
          {"uge", Op::Uge},   {"slt", Op::Slt},   {"sle", Op::Sle},   {"sgt", Op::Sgt},
          {"sge", Op::Sge},   {"bnot", Op::BNot}, {"band", Op::BAnd}, {"bor", Op::BOr},
          {"ite", Op::Ite},   {"concat", Op::Concat}};
      auto it = kOps.find(op);
      if (it == kOps.end()) throw expr_error("sexpr: unknown operator '" + op + "'");
      std::vector<ExprId> kids;
      while (cur.peek() == '(') kids.push_back(go());
      Op o = it->second;
      if (o == Op::BAnd) {
        result = band(std::move(kids));
      } else if (o == Op::BOr) {
        result = bor(std::move(kids));
      } else if (o == Op::Ite) {
        if (kids.size() != 3) throw expr_error("sexpr: ite arity");
        result = ite(kids[0], kids[1], kids[2]);
      } else if (o == Op::Not || o == Op::Neg || o == Op::BNot) {
        if (kids.size() != 1) throw expr_error("sexpr: unary arity");
        result = un(o, kids[0]);
      } else if (o == Op::Concat) {
        if (kids.size() != 2) throw expr_error("sexpr: concat arity");
        result = concat(kids[0], kids[1]);
      } else {
        if (kids.size() != 2) throw expr_error("sexpr: binary arity");
        result = bin(o, kids[0], kids[1]);
      }
    }
    cur.expect(')');
    return result;
  };
  ExprId e = go();
  cur.skip_ws();
  if (cur.pos != text.size()) throw expr_error("sexpr: trailing input");
  return e;
}

// Display precedence, loosely C-like; higher binds tighter.
namespace {
int prec_of(Op op) {
  switch (op) {
    case Op::BOr: return 1;
    case Op::BAnd: return 2;
    case Op::Eq:
    case Op::Ne:
    case Op::Ult:
    case Op::Ule:
    case Op::Ugt:
    case Op::Uge:
    case Op::Slt:
    case Op::Sle:
    case Op::Sgt:
    case Op::Sge: return 3;
    case Op::Or: return 4;
    case Op::Xor: return 5;
    case Op::And: return 6;
    case Op::Shl:
    case Op::Lshr:
    case Op::Ashr: return 7;
    case Op::Add:
    case Op::Sub: return 8;
    case Op::Mul: return 9;
    case Op::Concat: return 10;
    default: return 11;
  }
}

const char* infix_sym(Op op) {
  switch (op) {
    case Op::Add: return " + ";
    case Op::Sub: return " - ";
    case Op::Mul: return " * ";
    case Op::And: return " & ";
    case Op::Or: return " | ";
    case Op::Xor: return " ^ ";
    case Op::Shl: return " << ";
    case Op::Lshr: return " >> ";
    case Op::Ashr: return " >>a ";
    case Op::Eq: return " == ";
    case Op::Ne: return " != ";
    case Op::Ult: return " < ";
    case Op::Ule: return " <= ";
    case Op::Ugt: return " > ";
    case Op::Uge: return " >= ";
    case Op::Slt: return " <s ";
    case Op::Sle: return " <=s ";
    case Op::Sgt: return " >s ";
    case Op::Sge: return " >=s ";
    case Op::Concat: return " .. ";
    case Op::BAnd: return " && ";
    case Op::BOr: return " || ";
    default: return " ? ";
  }
}
}  // namespace

void ExprArena::display_rec(ExprId id, int parent_prec, std::string& out,
                            const std::map<uint64_t, std::string>* name_map) const {
  const ExprNode& n = nodes_[id];
  switch (n.op) {
    case Op::Var:
      out += n.name;
      return;
    case Op::Lit: {
      if (name_map) {
        auto it = name_map->find(n.value);
        if (it != name_map->end()) {
          out += it->second;
          return;
        }
      }
      out += hex(n.value);
      return;
    }
    case Op::Not:
      out += '~';
      display_rec(n.kids[0], 11, out, name_map);
      return;
    case Op::Neg:
      out += '-';
      display_rec(n.kids[0], 11, out, name_map);
      return;
    case Op::BNot:
      out += '!';
      display_rec(n.kids[0], 11, out, name_map);
      return;
    case Op::Extract:
      display_rec(n.kids[0], 11, out, name_map);
      out += '[';
      out += std::to_string(n.hi);
      out += ':';
      out += std::to_string(n.lo);
      out += ']';
      return;
    case Op::Zext:
    case Op::Sext:
      // Casts are noise in reports; the operand text carries the meaning.
      display_rec(n.kids[0], parent_prec, out, name_map);
      return;
    case Op::Ite:
      out += "ite(";
      display_rec(n.kids[0], 0, out, name_map);
      out += ", ";
      display_rec(n.kids[1], 0, out, name_map);
      out += ", ";
      display_rec(n.kids[2], 0, out, name_map);
      out += ')';
      return;
    default: {
      int p = prec_of(n.op);
      bool paren = p < parent_prec;
      if (paren) out += '(';
      const char* sym = infix_sym(n.op);
      for (size_t i = 0; i < n.kids.size(); i++) {
        if (i) out += sym;
        display_rec(n.kids[i], p + 1, out, name_map);
      }
      if (paren) out += ')';
      return;
    }
  }
}

std::string ExprArena::display(ExprId id) const {
  std::string out;
  display_rec(id, 0, out, nullptr);
  return out;
}

std::string ExprArena::display(ExprId id, const std::map<uint64_t, std::string>& name_map) const {
  std::string out;
  display_rec(id, 0, out, &name_map);
  return out;
}

}  // namespace ecinfer
