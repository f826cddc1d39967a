/* Copyright 2026 The partirc Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef PARTIR_PARSER_H_
#define PARTIR_PARSER_H_

#include <string_view>

#include "partir/ir.h"

namespace partir {

// Parses the textual IR and validates the result. Throws ParseError with
// line/column on malformed input and ValidationError on well-formed text
// that describes an invalid program.
Program parse_program(std::string_view text);

}  // namespace partir

#endif  // PARTIR_PARSER_H_
