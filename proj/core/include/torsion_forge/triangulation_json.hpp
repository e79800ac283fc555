#pragma once

#include <optional>
#include <string>

#include "torsion_forge/simplicial.hpp"

namespace torsion_forge {

struct DecoratedTriangulation {
  Triangulation tri;
  std::optional<HolonomyDecoration> decoration;
};

/// `{"tets": N, "gluings": [{"a":[t,f], "b":[t2,f2], "map":[i0,i1,i2]}, ...]}`
/// plus an optional `"decoration": {"order": p, "elements": [[g0,g1,g2,g3], ...]}`.
/// Output is compact with sorted keys, so write(read(s)) == s for any s
/// produced by the writer.
std::string to_json(const Triangulation& tri,
                    const std::optional<HolonomyDecoration>& decoration = std::nullopt);

/// Throws ParseError on malformed documents, and the usual construction
/// errors on invalid gluing data.
DecoratedTriangulation triangulation_from_json(const std::string& text);

}  // namespace torsion_forge
