#include "sgqa/semantic.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <vector>

#include "sgqa/attributes.hpp"
#include "sgqa/clustering.hpp"
#include "sgqa/errors.hpp"

namespace sgqa {

namespace {

std::string trimmed(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

// Collapses internal whitespace runs so "verify   rel" == "verify rel".
std::string squeeze(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : trimmed(s)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

std::vector<std::string> split_clauses(std::string_view s) {
  static constexpr std::string_view kArrow = "\xe2\x86\x92";  // U+2192
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t width = 0;
    if (s.substr(i, kArrow.size()) == kArrow) width = kArrow.size();
    else if (s.substr(i, 2) == "->") width = 2;
    if (width) {
      out.push_back(trimmed(s.substr(start, i - start)));
      i += width;
      start = i;
    } else {
      ++i;
    }
  }
  out.push_back(trimmed(s.substr(start)));
  return out;
}

std::optional<std::size_t> parse_ref(const std::string& token) {
  if (token.size() < 3 || token.front() != '[' || token.back() != ']') return std::nullopt;
  std::size_t idx = 0;
  const auto [ptr, ec] = std::from_chars(token.data() + 1, token.data() + token.size() - 1, idx);
  if (ec != std::errc() || ptr != token.data() + token.size() - 1) return std::nullopt;
  return idx;
}

class ClauseParser {
 public:
  ClauseParser(std::size_t index, const std::string& clause) : index_(index) {
    const std::size_t colon = clause.find(':');
    if (colon == std::string::npos) fail("expected 'operator: arguments'");
    head_ = squeeze(clause.substr(0, colon));
    for (std::size_t start = colon + 1;;) {
      const std::size_t comma = clause.find(',', start);
      std::string arg = squeeze(clause.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (!arg.empty() || comma != std::string::npos) args_.push_back(std::move(arg));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (args_.size() == 1 && args_[0] == "?") args_.clear();
    for (const auto& a : args_) {
      if (a.empty()) fail("empty argument");
    }
  }

  const std::string& head() const { return head_; }
  std::vector<std::string>& args() { return args_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("clause " + std::to_string(index_) + ": " + msg, index_);
  }

  void expect(std::size_t n) const {
    if (args_.size() != n) {
      fail("'" + head_ + "' expects " + std::to_string(n) + " argument(s), got " + std::to_string(args_.size()));
    }
  }

  /// Consumes a leading "[k]" if present, else the previous clause.
  Register source() {
    if (!args_.empty()) {
      if (const auto ref = parse_ref(args_.front())) {
        args_.erase(args_.begin());
        return checked(*ref);
      }
    }
    if (index_ == 0) fail("'" + head_ + "' needs an input but is the first clause");
    return Register{index_ - 1};
  }

  Register ref_at(std::size_t i) const {
    const auto ref = parse_ref(args_.at(i));
    if (!ref) fail("argument '" + args_.at(i) + "' must be a clause reference like [0]");
    return checked(*ref);
  }

  std::string category(const std::string& s) const {
    if (!parse_category(s)) fail("unknown attribute category '" + s + "'");
    return s;
  }

  std::string flipped_direction(const std::string& s) const {
    const auto d = parse_direction(s);
    if (!d) fail("direction must be subject or object, got '" + s + "'");
    return std::string(to_string(flip(*d)));
  }

 private:
  Register checked(std::size_t ref) const {
    if (ref >= index_) fail("reference [" + std::to_string(ref) + "] does not point to an earlier clause");
    return Register{ref};
  }

  std::size_t index_;
  std::string head_;
  std::vector<std::string> args_;
};

// "filter color" -> ("filter", "color"); "filter" -> ("filter", "").
std::pair<std::string, std::string> split_head(const std::string& head) {
  const std::size_t sp = head.find(' ');
  if (sp == std::string::npos) return {head, {}};
  return {head.substr(0, sp), head.substr(sp + 1)};
}

}  // namespace

Program parse_semantic_string(std::string_view s) {
  if (squeeze(s).empty()) throw ParseError("clause 0: empty semantic string", 0);
  const auto clauses = split_clauses(s);
  ProgramBuilder builder;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (clauses[i].empty()) throw ParseError("clause " + std::to_string(i) + ": empty clause", i);
    ClauseParser c(i, clauses[i]);
    const auto [op, qualifier] = split_head(c.head());
    auto& args = c.args();

    if (op == "select" && qualifier.empty()) {
      c.expect(1);
      builder.add(OpCode::select, {args[0]});
    } else if ((op == "filter" || op == "verify") && qualifier != "rel") {
      const Register src = c.source();
      std::string cat;
      if (qualifier.empty()) {
        c.expect(2);
        cat = c.category(args[0]);
        args.erase(args.begin());
      } else {
        c.expect(1);
        cat = c.category(qualifier);
      }
      builder.add(op == "filter" ? OpCode::filter_attr : OpCode::verify_attr, {src, cat, args[0]});
    } else if ((op == "relate" && qualifier.empty()) || (op == "verify" && qualifier == "rel")) {
      const Register src = c.source();
      c.expect(3);
      builder.add(op == "relate" ? OpCode::relate : OpCode::verify_rel,
                  {src, args[0], c.flipped_direction(args[1]), args[2]});
    } else if ((op == "query" || op == "common") && qualifier.empty()) {
      const Register src = c.source();
      c.expect(1);
      builder.add(op == "query" ? OpCode::query_attr : OpCode::common_attr, {src, c.category(args[0])});
    } else if ((op == "exist" || op == "count") && qualifier.empty()) {
      const Register src = c.source();
      c.expect(0);
      builder.add(op == "exist" ? OpCode::exist : OpCode::count, {src});
    } else if (op == "choose") {
      const Register src = c.source();
      std::string cat;
      if (qualifier.empty()) {
        c.expect(3);
        cat = c.category(args[0]);
        args.erase(args.begin());
      } else {
        c.expect(2);
        cat = c.category(qualifier);
      }
      builder.add(OpCode::choose_attr, {src, cat, args[0], args[1]});
    } else if (op == "compare" || op == "same") {
      std::string cat;
      if (qualifier.empty()) {
        c.expect(3);
        cat = c.category(args[0]);
        args.erase(args.begin());
      } else {
        c.expect(2);
        cat = c.category(qualifier);
      }
      builder.add(OpCode::compare_attr, {c.ref_at(0), c.ref_at(1), cat});
    } else if ((op == "and" || op == "or") && qualifier.empty()) {
      Register a{0}, b{0};
      if (args.empty()) {
        if (i < 2) c.fail("'" + op + "' without references needs two earlier clauses");
        a = Register{i - 2};
        b = Register{i - 1};
      } else {
        c.expect(2);
        a = c.ref_at(0);
        b = c.ref_at(1);
      }
      builder.add(op == "and" ? OpCode::logical_and : OpCode::logical_or, {a, b});
    } else {
      c.fail("unknown operator '" + c.head() + "'");
    }
  }
  Program p = std::move(builder).build();
  try {
    validate(p);
  } catch (const ProgramError& e) {
    throw ParseError("clause " + std::to_string(e.step()) + ": " + e.what(), e.step());
  }
  return p;
}

std::string render_semantic_string(const Program& p) {
  std::string out;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const Step& s = p.steps[i];
    const auto lit = [&](std::size_t a) { return std::get<std::string>(s.args[a]); };
    const auto ref = [&](std::size_t a) { return "[" + std::to_string(std::get<Register>(s.args[a]).index) + "]"; };
    // Explicit source reference unless it is the previous clause.
    const auto src = [&]() -> std::string {
      const std::size_t r = std::get<Register>(s.args[0]).index;
      return r + 1 == i ? "" : "[" + std::to_string(r) + "], ";
    };
    const auto unflip = [&](std::size_t a) { return std::string(to_string(flip(*parse_direction(lit(a))))); };
    std::string clause;
    switch (s.op) {
      case OpCode::select: clause = "select: " + lit(0); break;
      case OpCode::filter_attr: clause = "filter: " + src() + lit(1) + ", " + lit(2); break;
      case OpCode::relate: clause = "relate: " + src() + lit(1) + ", " + unflip(2) + ", " + lit(3); break;
      case OpCode::query_attr: clause = "query: " + src() + lit(1); break;
      case OpCode::common_attr: clause = "common: " + src() + lit(1); break;
      case OpCode::verify_attr: clause = "verify: " + src() + lit(1) + ", " + lit(2); break;
      case OpCode::verify_rel: clause = "verify rel: " + src() + lit(1) + ", " + unflip(2) + ", " + lit(3); break;
      case OpCode::exist: clause = "exist: " + (src().empty() ? std::string("?") : ref(0)); break;
      case OpCode::count: clause = "count: " + (src().empty() ? std::string("?") : ref(0)); break;
      case OpCode::compare_attr: clause = "compare: " + lit(2) + ", " + ref(0) + ", " + ref(1); break;
      case OpCode::choose_attr: clause = "choose: " + src() + lit(1) + ", " + lit(2) + ", " + lit(3); break;
      case OpCode::logical_and: clause = "and: " + ref(0) + ", " + ref(1); break;
      case OpCode::logical_or: clause = "or: " + ref(0) + ", " + ref(1); break;
    }
    if (!out.empty()) out += " -> ";
    out += clause;
  }
  return out;
}

}  // namespace sgqa
