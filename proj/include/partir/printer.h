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

#ifndef PARTIR_PRINTER_H_
#define PARTIR_PRINTER_H_

#include <string>

#include "partir/ir.h"

namespace partir {

// Canonical textual form. parse_program(print_program(p)) is structurally
// equal to p for every valid program.
std::string print_program(const Program& p);

// Shortest decimal form that round-trips through from_chars.
std::string format_f64(double v);

}  // namespace partir

#endif  // PARTIR_PRINTER_H_
