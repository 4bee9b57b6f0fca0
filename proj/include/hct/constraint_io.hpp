#pragma once

#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hct/constraint.hpp"
#include "hct/tree.hpp"

namespace hct {

// Line format, one constraint per line, '#' starts a comment:
//   a b | c          split pair
//   a | b | c        three-way
//   a b c            unlabeled tuple (k names)
//   tree: ((a,b),c); k-tuple shape
using ParsedConstraints = std::variant<OrientedSet, ConstraintSet>;

namespace detail {

inline std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::vector<std::string_view> split_bars(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '|') {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

inline Constraint parse_ktuple_line(std::string_view newick, PointSet& points, std::size_t line) {
  PointSet local;
  HierarchicalTree shape;
  try {
    shape = parse_newick(newick, local);
  } catch (const ParseError& e) {
    throw ParseError(line, e.what());
  }
  if (local.size() < 3) throw ParseError(line, "k-tuple needs at least 3 points");
  std::vector<Point> global;
  for (const auto& name : local.labels()) global.push_back(points.intern(name));
  return Constraint::ktuple(std::move(global), shape);
}

}  // namespace detail

inline ParsedConstraints parse_constraints(std::string_view text) {
  PointSet points;
  std::vector<Constraint> labeled;
  std::vector<std::vector<Point>> unlabeled;
  std::size_t k = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;

  auto intern_all = [&](const std::vector<std::string>& names, std::size_t line) {
    std::vector<Point> ids;
    for (const auto& nm : names) {
      if (!is_valid_point_name(nm)) throw ParseError(line, "invalid point name '" + nm + "'");
      ids.push_back(points.intern(nm));
    }
    std::vector<Point> sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ParseError(line, "duplicate point within a tuple");
    return ids;
  };

  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view raw = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto h = raw.find('#'); h != std::string_view::npos) raw = raw.substr(0, h);
    std::string_view line = detail::trim(raw);
    if (line.empty()) continue;

    bool is_labeled = true;
    std::size_t arity = 0;
    if (line.substr(0, 5) == "tree:") {
      Constraint c = detail::parse_ktuple_line(detail::trim(line.substr(5)), points, line_no);
      arity = c.arity();
      labeled.push_back(std::move(c));
    } else {
      auto parts = detail::split_bars(line);
      if (parts.size() == 1) {
        auto names = detail::split_ws(parts[0]);
        if (names.size() < 3) throw ParseError(line_no, "unlabeled tuple needs at least 3 points");
        unlabeled.push_back(intern_all(names, line_no));
        arity = names.size();
        is_labeled = false;
      } else if (parts.size() == 2) {
        auto left = detail::split_ws(parts[0]);
        auto right = detail::split_ws(parts[1]);
        if (left.size() != 2 || right.size() != 1)
          throw ParseError(line_no, "split pair must look like 'a b | c'");
        auto ids = intern_all({left[0], left[1], right[0]}, line_no);
        labeled.push_back(Constraint::split_pair(ids[0], ids[1], ids[2]));
        arity = 3;
      } else if (parts.size() == 3) {
        std::vector<std::string> names;
        for (auto p : parts) {
          auto w = detail::split_ws(p);
          if (w.size() != 1) throw ParseError(line_no, "three-way must look like 'a | b | c'");
          names.push_back(w[0]);
        }
        auto ids = intern_all(names, line_no);
        labeled.push_back(Constraint::three_way(ids[0], ids[1], ids[2]));
        arity = 3;
      } else {
        throw ParseError(line_no, "too many '|' separators");
      }
    }
    if (is_labeled && !unlabeled.empty())
      throw ParseError(line_no, "labeled constraint in an unlabeled file");
    if (!is_labeled && !labeled.empty())
      throw ParseError(line_no, "unlabeled tuple in a labeled file");
    if (!is_labeled) {
      if (k == 0) k = arity;
      if (arity != k) throw ParseError(line_no, "mixed tuple sizes");
    }
  }

  if (!unlabeled.empty()) {
    ConstraintSet cs;
    cs.points = std::move(points);
    cs.k = k;
    for (auto& t : unlabeled) cs.add(std::move(t));
    return cs;
  }
  OrientedSet os;
  os.points = std::move(points);
  for (auto& c : labeled) os.add(std::move(c));
  return os;
}

inline std::string format_constraint(const Constraint& c, const PointSet& points) {
  auto sorted_names = [&](std::vector<Point> ps) {
    std::vector<std::string> names;
    for (Point p : ps) names.push_back(points.name(p));
    std::sort(names.begin(), names.end());
    return names;
  };
  switch (c.kind()) {
    case ConstraintKind::kSplitPair: {
      const auto& s = c.as_split_pair();
      auto pair = sorted_names({s.first, s.second});
      return pair[0] + " " + pair[1] + " | " + points.name(s.cut);
    }
    case ConstraintKind::kThreeWay: {
      const auto& t = c.as_three_way();
      auto n = sorted_names({t.points.begin(), t.points.end()});
      return n[0] + " | " + n[1] + " | " + n[2];
    }
    case ConstraintKind::kKTuple: {
      const auto& kt = c.as_ktuple();
      PointSet local;
      for (Point p : kt.points) local.add(points.name(p));
      return "tree: " + write_newick(kt.shape, local);
    }
  }
  return {};
}

inline std::string format_tuple(const std::vector<Point>& tuple, const PointSet& points) {
  std::vector<std::string> names;
  for (Point p : tuple) names.push_back(points.name(p));
  std::sort(names.begin(), names.end());
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ' ';
    out += names[i];
  }
  return out;
}

inline std::string serialize_constraints(const OrientedSet& set) {
  std::string out;
  for (const auto& c : set.constraints) {
    out += format_constraint(c, set.points);
    out += '\n';
  }
  return out;
}

inline std::string serialize_constraints(const ConstraintSet& set) {
  std::string out;
  for (const auto& t : set.tuples) {
    out += format_tuple(t, set.points);
    out += '\n';
  }
  return out;
}

inline std::string serialize_constraints(const ParsedConstraints& set) {
  return std::visit([](const auto& s) { return serialize_constraints(s); }, set);
}

}  // namespace hct
