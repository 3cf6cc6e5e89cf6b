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

#include <string>
#include <string_view>
#include <vector>

// ASCII-only string helpers shared by the generation and ingestion code.
namespace countering::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
// Trims and squeezes internal whitespace runs to a single space.
std::string squeeze(std::string_view s);
std::vector<std::string> split_words(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string capitalize_first(std::string_view s);
// Removes trailing sentence punctuation and closing quotes.
std::string strip_trailing_punct(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool starts_with_icase(std::string_view s, std::string_view prefix);
// Joins non-empty pieces with single spaces.
std::string join_words(std::initializer_list<std::string_view> pieces);

}  // namespace countering::text
