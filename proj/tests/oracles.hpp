#pragma once

// Brute-force references used to check the engine. They share no code with
// the library beyond its data types.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "sgqa/bbox.hpp"
#include "sgqa/program.hpp"
#include "sgqa/scene_graph.hpp"

namespace sgqa::oracle {

// Pixel-grid IoU: count unit cells covered by both and by either box.
struct PixelIou {
  std::int64_t inter = 0;
  std::int64_t uni = 0;
};

inline PixelIou pixel_iou(const BoundingBox& a, const BoundingBox& b) {
  PixelIou r;
  const std::int64_t x0 = std::min(a.x, b.x), y0 = std::min(a.y, b.y);
  const std::int64_t x1 = std::max(a.x + a.w, b.x + b.w), y1 = std::max(a.y + a.h, b.y + b.h);
  for (std::int64_t y = y0; y < y1; ++y) {
    for (std::int64_t x = x0; x < x1; ++x) {
      const bool in_a = x >= a.x && x < a.x + a.w && y >= a.y && y < a.y + a.h;
      const bool in_b = x >= b.x && x < b.x + b.w && y >= b.y && y < b.y + b.h;
      r.inter += in_a && in_b;
      r.uni += in_a || in_b;
    }
  }
  return r;
}

// inter / uni > num / den
inline bool pixel_iou_above(const PixelIou& p, std::int64_t num, std::int64_t den) {
  return p.uni > 0 && p.inter * den > num * p.uni;
}

// Features as plain tuples: (kind, category-or-predicate, value-or-direction, target).
using RawFeature = std::tuple<int, std::string, std::string, std::string>;

inline std::map<ObjectId, std::set<RawFeature>> raw_features(const SceneGraph& g) {
  std::map<ObjectId, std::set<RawFeature>> out;
  for (const auto& [id, o] : g.objects) {
    auto& fs = out[id];
    for (const auto& [cat, values] : o.attributes) {
      for (const auto& v : values) fs.insert({0, std::to_string(static_cast<int>(cat)), v, ""});
    }
  }
  for (const auto& [id, o] : g.objects) {
    for (const auto& r : o.relations) {
      out[id].insert({1, r.predicate, "subject", g.objects.at(r.target).name});
      out[r.target].insert({1, r.predicate, "object", o.name});
    }
  }
  return out;
}

struct RawCluster {
  std::set<RawFeature> features;
  std::vector<ObjectId> members;
  friend bool operator<(const RawCluster& a, const RawCluster& b) {
    return std::tie(a.features, a.members) < std::tie(b.features, b.members);
  }
  friend bool operator==(const RawCluster& a, const RawCluster& b) {
    return a.features == b.features && a.members == b.members;
  }
};

// Every feature set of size 1..max_features held by at least two objects.
inline std::set<RawCluster> brute_clusters(const SceneGraph& g, std::size_t max_features) {
  const auto per_object = raw_features(g);
  std::set<RawFeature> universe;
  for (const auto& [id, fs] : per_object) universe.insert(fs.begin(), fs.end());
  std::vector<RawFeature> feats;
  for (const auto& f : universe) {
    std::size_t holders = 0;
    for (const auto& [id, fs] : per_object) holders += fs.contains(f);
    if (holders >= 2) feats.push_back(f);
  }
  std::set<RawCluster> out;
  std::vector<std::size_t> pick;
  // Depth-first over increasing index subsets.
  const auto recurse = [&](auto&& self, std::size_t from) -> void {
    if (!pick.empty()) {
      RawCluster c;
      for (std::size_t i : pick) c.features.insert(feats[i]);
      for (const auto& [id, fs] : per_object) {
        if (std::includes(fs.begin(), fs.end(), c.features.begin(), c.features.end())) c.members.push_back(id);
      }
      if (c.members.size() < 2) return;  // supersets cannot regain holders
      out.insert(std::move(c));
    }
    if (pick.size() == max_features) return;
    for (std::size_t i = from; i < feats.size(); ++i) {
      pick.push_back(i);
      self(self, i + 1);
      pick.pop_back();
    }
  };
  recurse(recurse, 0);
  return out;
}

// Reference interpreter over object bitmasks (graphs of at most 16 objects).
struct RNone {
  bool operator==(const RNone&) const = default;
};
using RValue = std::variant<RNone, std::uint16_t, std::set<std::string>, std::uint64_t, bool>;

inline std::vector<RValue> interpret(const Program& p, const SceneGraph& g) {
  std::vector<const ObjectNode*> objs;
  for (const auto& [id, o] : g.objects) objs.push_back(&o);
  const std::size_t n = objs.size();
  std::map<ObjectId, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[objs[i]->id] = i;
  // adj[pred][s] = mask of targets of s
  std::map<std::string, std::vector<std::uint16_t>> adj;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& r : objs[i]->relations) {
      auto& row = adj[r.predicate];
      row.resize(n, 0);
      row[i] |= static_cast<std::uint16_t>(1u << index.at(r.target));
    }
  }
  const auto lit = [](const Step& s, std::size_t k) { return std::get<std::string>(s.args[k]); };
  const auto cat_of = [](const std::string& s) { return *parse_category(s); };
  const auto named = [&](std::size_t i, const std::string& name) { return name == "*" || objs[i]->name == name; };
  const auto has = [&](std::size_t i, AttributeCategory c, const std::string& v) {
    const auto it = objs[i]->attributes.find(c);
    return it != objs[i]->attributes.end() && it->second.contains(v);
  };
  const auto values = [&](std::size_t i, AttributeCategory c) {
    const auto it = objs[i]->attributes.find(c);
    return it == objs[i]->attributes.end() ? std::set<std::string>{} : it->second;
  };
  const auto linked = [&](std::size_t i, const std::string& pred, const std::string& dir, std::size_t j) {
    const auto it = adj.find(pred);
    if (it == adj.end()) return false;
    // dir is the role of object i
    return dir == "subject" ? ((it->second[i] >> j) & 1u) != 0 : ((it->second[j] >> i) & 1u) != 0;
  };
  const auto bits = [&](std::uint16_t m) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i) {
      if ((m >> i) & 1u) out.push_back(i);
    }
    return out;
  };

  std::vector<RValue> regs;
  bool dead = false;
  for (const Step& s : p.steps) {
    if (dead) {
      regs.emplace_back(RNone{});
      continue;
    }
    const auto mask = [&](std::size_t k) { return std::get<std::uint16_t>(regs[std::get<Register>(s.args[k]).index]); };
    RValue out = RNone{};
    switch (s.op) {
      case OpCode::select: {
        std::uint16_t m = 0;
        for (std::size_t i = 0; i < n; ++i) {
          if (named(i, lit(s, 0))) m |= static_cast<std::uint16_t>(1u << i);
        }
        if (m) out = m;
        break;
      }
      case OpCode::filter_attr: {
        std::uint16_t m = 0;
        for (std::size_t i : bits(mask(0))) {
          if (has(i, cat_of(lit(s, 1)), lit(s, 2))) m |= static_cast<std::uint16_t>(1u << i);
        }
        if (m) out = m;
        break;
      }
      case OpCode::relate: {
        std::uint16_t m = 0;
        for (std::size_t i : bits(mask(0))) {
          for (std::size_t j = 0; j < n; ++j) {
            if (named(j, lit(s, 3)) && linked(i, lit(s, 1), lit(s, 2), j)) m |= static_cast<std::uint16_t>(1u << j);
          }
        }
        if (m) out = m;
        break;
      }
      case OpCode::query_attr: {
        std::set<std::string> v;
        for (std::size_t i : bits(mask(0))) {
          const auto own = values(i, cat_of(lit(s, 1)));
          v.insert(own.begin(), own.end());
        }
        if (!v.empty()) out = v;
        break;
      }
      case OpCode::common_attr: {
        const auto members = bits(mask(0));
        std::set<std::string> v = values(members.front(), cat_of(lit(s, 1)));
        for (std::size_t i : members) {
          const auto own = values(i, cat_of(lit(s, 1)));
          std::set<std::string> keep;
          for (const auto& x : v) {
            if (own.contains(x)) keep.insert(x);
          }
          v = keep;
        }
        if (!v.empty()) out = v;
        break;
      }
      case OpCode::verify_attr: {
        bool all = true;
        for (std::size_t i : bits(mask(0))) all = all && has(i, cat_of(lit(s, 1)), lit(s, 2));
        out = all;
        break;
      }
      case OpCode::verify_rel: {
        bool all = true;
        for (std::size_t i : bits(mask(0))) {
          bool any = false;
          for (std::size_t j = 0; j < n; ++j) any = any || (named(j, lit(s, 3)) && linked(i, lit(s, 1), lit(s, 2), j));
          all = all && any;
        }
        out = all;
        break;
      }
      case OpCode::exist: out = true; break;
      case OpCode::count: out = static_cast<std::uint64_t>(std::popcount(mask(0))); break;
      case OpCode::compare_attr: {
        std::set<std::string> a, b;
        for (std::size_t i : bits(mask(0))) {
          const auto v = values(i, cat_of(lit(s, 2)));
          a.insert(v.begin(), v.end());
        }
        for (std::size_t i : bits(mask(1))) {
          const auto v = values(i, cat_of(lit(s, 2)));
          b.insert(v.begin(), v.end());
        }
        out = a == b;
        break;
      }
      case OpCode::choose_attr: {
        bool first = true, second = true;
        for (std::size_t i : bits(mask(0))) {
          first = first && has(i, cat_of(lit(s, 1)), lit(s, 2));
          second = second && has(i, cat_of(lit(s, 1)), lit(s, 3));
        }
        if (first != second) out = std::set<std::string>{first ? lit(s, 2) : lit(s, 3)};
        break;
      }
      case OpCode::logical_and:
      case OpCode::logical_or: {
        const bool a = std::get<bool>(regs[std::get<Register>(s.args[0]).index]);
        const bool b = std::get<bool>(regs[std::get<Register>(s.args[1]).index]);
        out = s.op == OpCode::logical_and ? (a && b) : (a || b);
        break;
      }
    }
    if (std::holds_alternative<RNone>(out)) dead = true;
    regs.push_back(std::move(out));
  }
  return regs;
}

}  // namespace sgqa::oracle
