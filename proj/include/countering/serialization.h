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

#pragma once

#include "countering/corpus.h"
#include "countering/counter.h"
#include "countering/generic.h"
#include "countering/subtype.h"
#include "json.hpp"

// JSON forms of the generation-side domain types. Object keys are emitted in
// sorted order, so equal values always serialize to identical bytes.
namespace countering {

nlohmann::json to_json(const Generic& g);
Generic generic_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Subtype& s);
Subtype subtype_from_json(const nlohmann::json& j);

// Omits source_generic, which is stored once per counter set.
nlohmann::json to_json(const Counterstatement& cs);
Counterstatement counterstatement_from_json(const nlohmann::json& j,
                                            const Generic& source);

nlohmann::json to_json(const StereotypePair& p);
StereotypePair pair_from_json(const nlohmann::json& j);

}  // namespace countering
