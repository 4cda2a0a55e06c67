#pragma once
/**
 * @file norm_json.hpp
 * @brief JSON form of NormSpec.
 *
 *   {"type":"lp","p":1.5}                 p may be the string "inf"
 *   {"type":"polygon","vertices":[[1,1],[-1,1],[-1,-1],[1,-1]]}
 *   {"type":"ellipse","m":[[a,b],[b,c]]}
 *   {"type":"section","ambient":{"type":"lp","p":"inf","dim":3},"x":[...],"y":[...]}
 *   {"type":"scaled","factor":f,"inner":{...}}     ball factor * B_inner
 *   {"type":"linear","map":[[a,b],[c,d]],"inner":{...}}   ||v|| = ||A v||_inner
 *
 * Parse failures throw ParseError carrying a JSON pointer to the bad node.
 * A section serializes with its orthonormalized basis as x and y, which
 * parses back to the same norm.
 */

#include <string>

#include "errors.hpp"
#include "norms.hpp"
#include "report.hpp"

namespace unisphere {

namespace detail {

inline Json exponent_to_json(const LpExponent& e) { return e.is_infinite() ? Json("inf") : Json(e.p); }


}  // namespace detail

inline Json to_json(const NormSpecN& n) {
  if (const auto* e = n.lp_exponent())
    return Json{{"type", "lp"}, {"p", detail::exponent_to_json(*e)}, {"dim", n.dim()}};
  return Json{{"type", "custom"}, {"label", n.label()}, {"dim", n.dim()}};
}

inline Json to_json(const NormSpec& spec) {
  return std::visit(
      [](const auto& n) -> Json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NormSpec::Lp>) {
          return Json{{"type", "lp"}, {"p", detail::exponent_to_json(n.exponent)}};
        } else if constexpr (std::is_same_v<T, NormSpec::Polygon>) {
          Json verts = Json::array();
          for (const auto& v : n.vertices) verts.push_back(to_json(v));
          return Json{{"type", "polygon"}, {"vertices", verts}};
        } else if constexpr (std::is_same_v<T, NormSpec::Ellipse>) {
          return Json{{"type", "ellipse"}, {"m", to_json(n.m)}};
        } else if constexpr (std::is_same_v<T, NormSpec::Section>) {
          return Json{{"type", "section"}, {"ambient", to_json(n.ambient)}, {"x", n.u}, {"y", n.v}};
        } else if constexpr (std::is_same_v<T, NormSpec::Scaled>) {
          return Json{{"type", "scaled"}, {"factor", n.factor}, {"inner", to_json(*n.inner)}};
        } else {
          return Json{{"type", "linear"}, {"map", to_json(n.map)}, {"inner", to_json(*n.inner)}};
        }
      },
      spec.variant());
}

namespace detail {

template <class J>
const J& member(const J& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(path + "/" + key, "missing field");
  return *it;
}

template <class J>
double number(const J& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  const double v = j.template get<double>();
  if (!std::isfinite(v)) throw ParseError(path, "expected a finite number");
  return v;
}

template <class J>
LpExponent exponent(const J& j, const std::string& path) {
  if (j.is_string()) {
    const auto s = j.template get<std::string>();
    if (s == "inf" || s == "infinity" || s == "Infinity") return LpExponent::infinity();
    throw ParseError(path, "expected a number >= 1 or \"inf\"");
  }
  const double p = number(j, path);
  if (!(p >= 1.0)) throw ParseError(path, "p must be >= 1 (p < 1 is not a norm)");
  return LpExponent::finite(p);
}

template <class J>
Vec2 vec2(const J& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ParseError(path, "expected a pair [x, y]");
  return {number(j[0], path + "/0"), number(j[1], path + "/1")};
}

template <class J>
VecN vecn(const J& j, const std::string& path) {
  if (!j.is_array() || j.size() < 2) throw ParseError(path, "expected an array of at least 2 numbers");
  VecN out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "/" + std::to_string(i)));
  return out;
}

template <class J>
Mat2 mat2(const J& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ParseError(path, "expected a 2x2 matrix [[a,b],[c,d]]");
  const Vec2 r0 = vec2(j[0], path + "/0"), r1 = vec2(j[1], path + "/1");
  return {r0.x, r0.y, r1.x, r1.y};
}

template <class J>
std::string type_of(const J& j, const std::string& path) {
  const auto& t = member(j, "type", path);
  if (!t.is_string()) throw ParseError(path + "/type", "expected a string");
  return t.template get<std::string>();
}

template <class J>
NormSpecN ambient_from_json(const J& j, const std::string& path, std::size_t inferred_dim) {
  const auto type = type_of(j, path);
  if (type != "lp") throw ParseError(path + "/type", "ambient norm must be \"lp\" (custom gauges are code-only)");
  const auto e = exponent(member(j, "p", path), path + "/p");
  std::size_t dim = inferred_dim;
  if (auto it = j.find("dim"); it != j.end()) {
    if (!it->is_number_unsigned()) throw ParseError(path + "/dim", "expected a positive integer");
    dim = it->template get<std::size_t>();
  }
  if (dim < 2) throw ParseError(path + "/dim", "dimension must be at least 2");
  return NormSpecN::lp(e, dim);
}

template <class J>
NormSpec norm_from_json_at(const J& j, const std::string& path) {
  const auto type = type_of(j, path);
  // Construction errors (invalid polygon, non-PD matrix, ...) are reported at this node.
  auto guarded = [&](auto&& build) -> NormSpec {
    try {
      return build();
    } catch (const InvalidNorm& e) {
      throw ParseError(path, e.what());
    } catch (const DegenerateSection& e) {
      throw ParseError(path, e.what());
    }
  };
  if (type == "lp") {
    const auto e = exponent(member(j, "p", path), path + "/p");
    return NormSpec::lp(e);
  }
  if (type == "polygon") {
    const auto& vs = member(j, "vertices", path);
    if (!vs.is_array()) throw ParseError(path + "/vertices", "expected an array of [x, y] pairs");
    std::vector<Vec2> verts;
    for (std::size_t i = 0; i < vs.size(); ++i) verts.push_back(vec2(vs[i], path + "/vertices/" + std::to_string(i)));
    return guarded([&] { return NormSpec::polygon(std::move(verts)); });
  }
  if (type == "ellipse") {
    const Mat2 m = mat2(member(j, "m", path), path + "/m");
    return guarded([&] { return NormSpec::ellipse(m); });
  }
  if (type == "section") {
    const VecN x = vecn(member(j, "x", path), path + "/x");
    const VecN y = vecn(member(j, "y", path), path + "/y");
    const auto ambient = ambient_from_json(member(j, "ambient", path), path + "/ambient", x.size());
    if (x.size() != ambient.dim() || y.size() != ambient.dim())
      throw ParseError(path, "x and y must have the ambient dimension");
    return guarded([&] { return section_norm(ambient, x, y); });
  }
  if (type == "scaled") {
    const double f = number(member(j, "factor", path), path + "/factor");
    const NormSpec inner = norm_from_json_at(member(j, "inner", path), path + "/inner");
    if (!(f > 0.0)) throw ParseError(path + "/factor", "factor must be positive");
    return NormSpec::scaled(inner, f);
  }
  if (type == "linear") {
    const Mat2 map = mat2(member(j, "map", path), path + "/map");
    const NormSpec inner = norm_from_json_at(member(j, "inner", path), path + "/inner");
    return guarded([&] { return NormSpec::linear(inner, map); });
  }
  throw ParseError(path + "/type", "unknown norm type \"" + type + "\"");
}

}  // namespace detail

template <class J>
NormSpec norm_from_json(const J& j) {
  return detail::norm_from_json_at(j, "");
}

/// Parses JSON text; syntax errors become ParseError with an empty path.
inline NormSpec norm_from_string(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
  return norm_from_json(j);
}

}  // namespace unisphere
