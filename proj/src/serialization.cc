// Copyright 2026 The Countering Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "countering/serialization.h"

#include <fmt/format.h>

#include "countering/errors.h"

namespace countering {

using nlohmann::json;

json to_json(const Generic& g) {
  return json{{"surface_text", g.surface_text},
              {"group", g.group},
              {"relation", g.relation},
              {"quality", g.quality},
              {"canonical_group", g.canonical_group}};
}

Generic generic_from_json(const json& j) {
  Generic g;
  g.surface_text = j.at("surface_text").get<std::string>();
  g.group = j.at("group").get<std::string>();
  g.relation = j.at("relation").get<std::string>();
  g.quality = j.at("quality").get<std::string>();
  g.canonical_group = j.value("canonical_group", g.group);
  return g;
}

json to_json(const Subtype& s) {
  return json{{"surface", s.surface},
              {"kind", std::string(to_string(s.kind))},
              {"score", s.score}};
}

Subtype subtype_from_json(const json& j) {
  Subtype s;
  s.surface = j.at("surface").get<std::string>();
  auto kind = parse_subtype_kind(j.at("kind").get<std::string>());
  if (!kind) throw InputError("unknown subtype kind " + j.at("kind").dump());
  s.kind = *kind;
  s.score = j.value("score", 0.0);
  return s;
}

json to_json(const Counterstatement& cs) {
  json subs = json::array();
  for (const auto& s : cs.subtypes_used) subs.push_back(to_json(s));
  return json{{"kind", std::string(to_string(cs.kind))},
              {"preamble", cs.preamble},
              {"body", cs.body},
              {"full_text", cs.full_text},
              {"subtypes_used", std::move(subs)}};
}

Counterstatement counterstatement_from_json(const json& j, const Generic& source) {
  Counterstatement cs;
  auto kind = parse_counter_kind(j.at("kind").get<std::string>());
  if (!kind) throw InputError("unknown counterstatement kind " + j.at("kind").dump());
  cs.kind = *kind;
  cs.preamble = j.at("preamble").get<std::string>();
  cs.body = j.at("body").get<std::string>();
  cs.full_text = j.at("full_text").get<std::string>();
  cs.source_generic = source;
  for (const auto& s : j.at("subtypes_used")) cs.subtypes_used.push_back(subtype_from_json(s));
  return cs;
}

json to_json(const StereotypePair& p) {
  json j{{"post_text", p.post_text},
         {"stereotype_text", p.stereotype_text},
         {"group", p.group},
         {"support", p.support}};
  if (p.triple) {
    j["triple"] = json{{"group", p.triple->group},
                       {"relation", p.triple->relation},
                       {"quality", p.triple->quality}};
  }
  return j;
}

StereotypePair pair_from_json(const json& j) {
  StereotypePair p;
  p.post_text = j.at("post_text").get<std::string>();
  p.stereotype_text = j.at("stereotype_text").get<std::string>();
  p.group = j.value("group", std::string());
  p.support = j.value("support", 0);
  if (j.contains("triple") && !j["triple"].is_null()) {
    const auto& t = j["triple"];
    p.triple = GenericTriple{t.at("group").get<std::string>(),
                             t.at("relation").get<std::string>(),
                             t.value("quality", std::string())};
  }
  return p;
}

}  // namespace countering
