#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace hct {

// Dense point index. Names are interned once at parse time; every algorithm
// works on indices.
using Point = std::int32_t;
inline constexpr Point kNoPoint = -1;

// Thrown when a search would exceed a configured cap. `cap()` names the cap.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::string cap, const std::string& what)
      : std::runtime_error(what), cap_(std::move(cap)) {}
  const std::string& cap() const noexcept { return cap_; }

 private:
  std::string cap_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

inline bool is_valid_point_name(std::string_view name) {
  if (name.empty()) return false;
  for (char ch : name) {
    switch (ch) {
      case '|': case ',': case '(': case ')': case ';':
      case ' ': case '\t': case '\n': case '\r': case '\v': case '\f':
        return false;
      default:
        break;
    }
  }
  return true;
}

class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::vector<std::string> labels) {
    for (auto& l : labels) add(l);
  }

  // Builds p0..p{n-1}.
  static PointSet numbered(std::size_t n, std::string_view prefix = "p") {
    PointSet ps;
    for (std::size_t i = 0; i < n; ++i) ps.add(std::string(prefix) + std::to_string(i));
    return ps;
  }

  // Single letters a..z for n <= 26, numbered otherwise.
  static PointSet letters(std::size_t n) {
    if (n > 26) return numbered(n);
    PointSet ps;
    for (std::size_t i = 0; i < n; ++i) ps.add(std::string(1, static_cast<char>('a' + i)));
    return ps;
  }

  Point add(const std::string& name) {
    if (!is_valid_point_name(name)) throw std::invalid_argument("invalid point name '" + name + "'");
    if (index_.count(name)) throw std::invalid_argument("duplicate point name '" + name + "'");
    Point id = static_cast<Point>(labels_.size());
    labels_.push_back(name);
    index_.emplace(name, id);
    return id;
  }

  // Returns the existing index or adds the name.
  Point intern(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    return add(name);
  }

  Point find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? kNoPoint : it->second;
  }

  std::size_t size() const noexcept { return labels_.size(); }
  bool contains(Point p) const noexcept { return p >= 0 && static_cast<std::size_t>(p) < labels_.size(); }
  const std::string& name(Point p) const { return labels_.at(static_cast<std::size_t>(p)); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  friend bool operator==(const PointSet& a, const PointSet& b) { return a.labels_ == b.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Point> index_;
};

// An unlabeled triple, stored sorted.
struct Triplet {
  std::array<Point, 3> points{};

  Triplet() = default;
  Triplet(Point a, Point b, Point c) : points{a, b, c} {
    if (a == b || a == c || b == c) throw std::invalid_argument("triplet points must be distinct");
    std::sort(points.begin(), points.end());
  }

  Point operator[](std::size_t i) const { return points[i]; }
  bool contains(Point p) const { return points[0] == p || points[1] == p || points[2] == p; }
  friend auto operator<=>(const Triplet&, const Triplet&) = default;
};

}  // namespace hct
