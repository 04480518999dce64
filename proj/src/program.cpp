#include "sgqa/program.hpp"

#include <array>
#include <cctype>
#include <charconv>

#include "sgqa/attributes.hpp"
#include "sgqa/errors.hpp"

namespace sgqa {

namespace {

using K = OperandKind;

constexpr std::array<OperandKind, 1> kSelect{K::name};
constexpr std::array<OperandKind, 3> kFilter{K::objects, K::category, K::value};
constexpr std::array<OperandKind, 4> kRelate{K::objects, K::predicate, K::direction, K::name};
constexpr std::array<OperandKind, 2> kQuery{K::objects, K::category};
constexpr std::array<OperandKind, 1> kUnary{K::objects};
constexpr std::array<OperandKind, 3> kCompare{K::objects, K::objects, K::category};
constexpr std::array<OperandKind, 4> kChoose{K::objects, K::category, K::value, K::value};
constexpr std::array<OperandKind, 2> kLogic{K::boolean, K::boolean};

struct OpInfo {
  OpCode op;
  std::string_view name;
  std::span<const OperandKind> operands;
  ResultKind result;
};

const std::array<OpInfo, 13> kOps{{
    {OpCode::select, "select", kSelect, ResultKind::objects},
    {OpCode::filter_attr, "filter_attr", kFilter, ResultKind::objects},
    {OpCode::relate, "relate", kRelate, ResultKind::objects},
    {OpCode::query_attr, "query_attr", kQuery, ResultKind::values},
    {OpCode::common_attr, "common_attr", kQuery, ResultKind::values},
    {OpCode::verify_attr, "verify_attr", kFilter, ResultKind::boolean},
    {OpCode::verify_rel, "verify_rel", kRelate, ResultKind::boolean},
    {OpCode::exist, "exist", kUnary, ResultKind::boolean},
    {OpCode::count, "count", kUnary, ResultKind::number},
    {OpCode::compare_attr, "compare_attr", kCompare, ResultKind::boolean},
    {OpCode::choose_attr, "choose_attr", kChoose, ResultKind::values},
    {OpCode::logical_and, "and", kLogic, ResultKind::boolean},
    {OpCode::logical_or, "or", kLogic, ResultKind::boolean},
}};

const OpInfo& info(OpCode op) { return kOps[static_cast<std::size_t>(op)]; }

bool is_register_operand(OperandKind k) { return k == K::objects || k == K::boolean; }

std::optional<Register> parse_register(std::string_view s) {
  if (s.size() < 2 || s[0] != 'r') return std::nullopt;
  std::size_t idx = 0;
  const auto [ptr, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), idx);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return Register{idx};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool needs_quoting(const std::string& s) {
  if (s.empty() || parse_register(s)) return true;
  if (std::isspace(static_cast<unsigned char>(s.front())) || std::isspace(static_cast<unsigned char>(s.back()))) {
    return true;
  }
  for (char c : s) {
    if (c == ',' || c == '(' || c == ')' || c == '"' || c == '\n' || c == '\\') return true;
  }
  return false;
}

std::string render_literal(const std::string& s) {
  return needs_quoting(s) ? nlohmann::json(s).dump() : s;
}

struct RawArg {
  std::string text;
  bool quoted = false;
};

// Splits "a, \"b,c\", r0" into raw tokens, honoring JSON-quoted literals.
std::vector<RawArg> split_args(std::string_view body, std::size_t line) {
  std::vector<RawArg> out;
  std::size_t i = 0;
  body = trim(body);
  if (body.empty()) return out;
  while (true) {
    while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
    RawArg arg;
    if (i < body.size() && body[i] == '"') {
      std::size_t j = i + 1;
      while (j < body.size() && body[j] != '"') j += (body[j] == '\\') ? 2 : 1;
      if (j >= body.size()) throw ParseError("line " + std::to_string(line) + ": unterminated string literal", line);
      try {
        arg.text = nlohmann::json::parse(body.substr(i, j - i + 1)).get<std::string>();
      } catch (const nlohmann::json::exception&) {
        throw ParseError("line " + std::to_string(line) + ": bad string literal", line);
      }
      arg.quoted = true;
      i = j + 1;
      while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
    } else {
      const std::size_t comma = body.find(',', i);
      const std::size_t end = comma == std::string_view::npos ? body.size() : comma;
      arg.text = std::string(trim(body.substr(i, end - i)));
      i = end;
    }
    out.push_back(std::move(arg));
    if (i >= body.size()) break;
    if (body[i] != ',') throw ParseError("line " + std::to_string(line) + ": expected ',' between arguments", line);
    ++i;
  }
  return out;
}

}  // namespace

std::string_view to_string(OpCode op) { return info(op).name; }

std::optional<OpCode> parse_opcode(std::string_view s) {
  for (const auto& i : kOps) {
    if (i.name == s) return i.op;
  }
  return std::nullopt;
}

std::span<const OperandKind> signature(OpCode op) { return info(op).operands; }
ResultKind result_kind(OpCode op) { return info(op).result; }

std::string register_name(Register r) { return "r" + std::to_string(r.index); }

void validate(const Program& p) {
  if (p.steps.empty()) throw ProgramError("program has no steps", 0);
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const Step& s = p.steps[i];
    const auto where = "step " + std::to_string(i) + " (" + std::string(to_string(s.op)) + "): ";
    if (s.out.index != i) throw ProgramError(where + "must write register r" + std::to_string(i), i);
    const auto sig = signature(s.op);
    if (s.args.size() != sig.size()) {
      throw ProgramError(where + "expected " + std::to_string(sig.size()) + " arguments, got " +
                             std::to_string(s.args.size()),
                         i);
    }
    for (std::size_t a = 0; a < sig.size(); ++a) {
      const Arg& arg = s.args[a];
      if (is_register_operand(sig[a])) {
        const auto* reg = std::get_if<Register>(&arg);
        if (!reg) throw ProgramError(where + "argument " + std::to_string(a) + " must be a register", i);
        if (reg->index >= i) {
          throw ProgramError(where + "register " + register_name(*reg) + " is not defined before use", i);
        }
        const ResultKind produced = result_kind(p.steps[reg->index].op);
        const ResultKind wanted = sig[a] == K::objects ? ResultKind::objects : ResultKind::boolean;
        if (produced != wanted) {
          throw ProgramError(where + "register " + register_name(*reg) + " holds the wrong kind of value", i);
        }
        continue;
      }
      const auto* lit = std::get_if<std::string>(&arg);
      if (!lit) throw ProgramError(where + "argument " + std::to_string(a) + " must be a literal", i);
      if (lit->empty()) throw ProgramError(where + "argument " + std::to_string(a) + " is empty", i);
      if (sig[a] == K::category && !parse_category(*lit)) {
        throw ProgramError(where + "unknown attribute category '" + *lit + "'", i);
      }
      if (sig[a] == K::direction && *lit != "subject" && *lit != "object") {
        throw ProgramError(where + "direction must be 'subject' or 'object', got '" + *lit + "'", i);
      }
    }
  }
}

std::string render_program(const Program& p) {
  std::string out;
  for (const Step& s : p.steps) {
    if (!out.empty()) out += '\n';
    out += register_name(s.out);
    out += " = ";
    out += to_string(s.op);
    out += '(';
    for (std::size_t a = 0; a < s.args.size(); ++a) {
      if (a) out += ", ";
      if (const auto* reg = std::get_if<Register>(&s.args[a])) {
        out += register_name(*reg);
      } else {
        out += render_literal(std::get<std::string>(s.args[a]));
      }
    }
    out += ')';
  }
  return out;
}

Program parse_pseudocode(std::string_view text) {
  Program p;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const std::size_t idx = line_no++;
    const auto fail = [&](const std::string& msg) -> ParseError {
      return ParseError("line " + std::to_string(idx) + ": " + msg, idx);
    };
    const std::size_t eq = line.find('=');
    const std::size_t open = line.find('(');
    if (eq == std::string_view::npos || open == std::string_view::npos || open < eq || line.back() != ')') {
      throw fail("expected 'rK = op(args)'");
    }
    const auto out = parse_register(trim(line.substr(0, eq)));
    if (!out) throw fail("left-hand side must be a register");
    const std::string_view op_name = trim(line.substr(eq + 1, open - eq - 1));
    const auto op = parse_opcode(op_name);
    if (!op) throw fail("unknown operator '" + std::string(op_name) + "'");
    const auto raw = split_args(line.substr(open + 1, line.size() - open - 2), idx);
    const auto sig = signature(*op);
    if (raw.size() != sig.size()) {
      throw fail("expected " + std::to_string(sig.size()) + " arguments, got " + std::to_string(raw.size()));
    }
    Step step{*op, {}, *out};
    for (std::size_t a = 0; a < raw.size(); ++a) {
      if (is_register_operand(sig[a]) && !raw[a].quoted) {
        const auto reg = parse_register(raw[a].text);
        if (!reg) throw fail("argument " + std::to_string(a) + " must be a register");
        step.args.emplace_back(*reg);
      } else {
        step.args.emplace_back(raw[a].text);
      }
    }
    p.steps.push_back(std::move(step));
    if (end == text.size()) break;
  }
  if (p.steps.empty()) throw ParseError("empty program", 0);
  try {
    validate(p);
  } catch (const ProgramError& e) {
    throw ParseError(e.what(), e.step());
  }
  return p;
}

nlohmann::json to_json(const Program& p) {
  nlohmann::json steps = nlohmann::json::array();
  for (const Step& s : p.steps) {
    nlohmann::json args = nlohmann::json::array();
    for (const Arg& a : s.args) {
      if (const auto* reg = std::get_if<Register>(&a)) {
        args.push_back(register_name(*reg));
      } else {
        args.push_back(std::get<std::string>(a));
      }
    }
    steps.push_back({{"op", to_string(s.op)}, {"args", std::move(args)}, {"out", register_name(s.out)}});
  }
  return steps;
}

Program program_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw SchemaError("program must be a JSON array of steps");
  Program p;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& s = j[i];
    if (!s.is_object() || !s.contains("op") || !s.contains("args") || !s.contains("out")) {
      throw SchemaError("program step " + std::to_string(i) + " needs op, args and out");
    }
    const auto op = parse_opcode(s["op"].get<std::string>());
    if (!op) throw ProgramError("step " + std::to_string(i) + ": unknown operator '" + s["op"].get<std::string>() + "'", i);
    const auto out = parse_register(s["out"].get<std::string>());
    if (!out) throw ProgramError("step " + std::to_string(i) + ": bad output register", i);
    Step step{*op, {}, *out};
    const auto sig = signature(*op);
    const auto& args = s["args"];
    for (std::size_t a = 0; a < args.size(); ++a) {
      const std::string text = args[a].get<std::string>();
      if (a < sig.size() && is_register_operand(sig[a])) {
        const auto reg = parse_register(text);
        if (!reg) throw ProgramError("step " + std::to_string(i) + ": argument " + std::to_string(a) + " must be a register", i);
        step.args.emplace_back(*reg);
      } else {
        step.args.emplace_back(text);
      }
    }
    p.steps.push_back(std::move(step));
  }
  validate(p);
  return p;
}

Register ProgramBuilder::add(OpCode op, std::vector<Arg> args) {
  const Register out{program_.steps.size()};
  program_.steps.push_back({op, std::move(args), out});
  return out;
}

Program ProgramBuilder::build() && { return std::move(program_); }

}  // namespace sgqa
