#include "torsion_forge/triangulation_json.hpp"

#include <json.hpp>

#include "torsion_forge/error.hpp"

namespace torsion_forge {

using nlohmann::json;

std::string to_json(const Triangulation& tri, const std::optional<HolonomyDecoration>& decoration) {
  json doc;
  doc["tets"] = tri.tet_count();
  json gluings = json::array();
  for (const Gluing& g : tri.gluings()) {
    gluings.push_back({{"a", {g.a.tet, g.a.face}},
                       {"b", {g.b.tet, g.b.face}},
                       {"map", {g.map[0], g.map[1], g.map[2]}}});
  }
  doc["gluings"] = std::move(gluings);
  if (decoration) {
    json elements = json::array();
    for (const auto& row : decoration->element) elements.push_back(row);
    doc["decoration"] = {{"order", decoration->order}, {"elements", std::move(elements)}};
  }
  return doc.dump();
}

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

FaceSlot read_slot(const json& j) {
  if (!j.is_array() || j.size() != 2) parse_error("face slot must be [tet, face]");
  return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

DecoratedTriangulation triangulation_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    parse_error(e.what());
  }
  std::vector<Gluing> gluings;
  int tets = 0;
  std::optional<HolonomyDecoration> decoration;
  try {
    if (!doc.is_object() || !doc.contains("tets") || !doc.contains("gluings"))
      parse_error("expected an object with \"tets\" and \"gluings\"");
    tets = doc.at("tets").get<int>();
    for (const json& g : doc.at("gluings")) {
      const json& map = g.at("map");
      if (!map.is_array() || map.size() != 3) parse_error("gluing map must have three entries");
      gluings.push_back({read_slot(g.at("a")), read_slot(g.at("b")),
                         {map[0].get<int>(), map[1].get<int>(), map[2].get<int>()}});
    }
    if (doc.contains("decoration")) {
      const json& d = doc.at("decoration");
      HolonomyDecoration deco;
      deco.order = d.at("order").get<int>();
      for (const json& row : d.at("elements")) {
        if (!row.is_array() || row.size() != 4) parse_error("decoration rows need four entries");
        deco.element.push_back({row[0].get<int>(), row[1].get<int>(), row[2].get<int>(),
                                row[3].get<int>()});
      }
      decoration = std::move(deco);
    }
  } catch (const json::exception& e) {
    parse_error(e.what());
  }
  DecoratedTriangulation out{build_triangulation(tets, gluings), std::move(decoration)};
  if (out.decoration) validate_decoration(out.tri, *out.decoration);
  return out;
}

}  // namespace torsion_forge
