// Copyright 2026 The vexplore Authors.
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

#include "vexplore/csv.hpp"

#include "vexplore/error.hpp"

namespace vexplore {

std::optional<std::vector<std::string>> CsvReader::next() {
  while (true) {
    if (in_.peek() == std::char_traits<char>::eof()) return std::nullopt;
    record_line_ = line_;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool at_field_start = true;
    bool any_content = false;
    int c;
    while ((c = in_.get()) != std::char_traits<char>::eof()) {
      const char ch = static_cast<char>(c);
      if (quoted) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            quoted = false;
          }
        } else {
          if (ch == '\n') ++line_;
          field.push_back(ch);
        }
        continue;
      }
      if (ch == '"' && at_field_start) {
        quoted = true;
        at_field_start = false;
        any_content = true;
      } else if (ch == ',') {
        fields.push_back(std::move(field));
        field.clear();
        at_field_start = true;
        any_content = true;
      } else if (ch == '\r') {
        // swallowed; the following '\n' ends the record
      } else if (ch == '\n') {
        ++line_;
        break;
      } else {
        field.push_back(ch);
        at_field_start = false;
        any_content = true;
      }
    }
    if (quoted) {
      throw Error(ErrorCode::kMalformedInput, "unterminated quoted field",
                  {{"row", std::to_string(record_line_)}});
    }
    if (!any_content && field.empty()) continue;
    fields.push_back(std::move(field));
    return fields;
  }
}

}  // namespace vexplore
