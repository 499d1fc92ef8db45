// Copyright 2026 The Spanforge Authors.
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

#include <json.hpp>

#include "spanforge/formula.hpp"
#include "spanforge/span_program.hpp"

namespace spanforge::io {

using Json = nlohmann::ordered_json;

// Whole file as text. Throws Error naming the path.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view text);

// {gate, truth_table, children} for gates and {var} (1-based) for leaves.
Json formula_to_json(const Formula& phi);
// Gates missing from the registry are rebuilt from their truth_table.
Formula formula_from_json(const Json& j, const GateRegistry& registry);

// {n, dim, target, free, inputs: [{j, b, vectors}], labels}. j is 1-based.
// labels follow the column order: free columns, then inputs in listed order.
Json program_to_json(const SpanProgram& p);
SpanProgram program_from_json(const Json& j);

Json witness_to_json(const WitnessResult& r, const BitString& x);
Json metrics_to_json(const Formula& phi, const FormulaMetrics& m);

// Formula file: DSL text, '#' starts a comment. Parse errors are rethrown
// with "path:line:col: " in front.
Formula load_formula(const std::string& path, const GateRegistry& registry);
SpanProgram load_program(const std::string& path);
GateRegistry load_registry(const std::string& path);

// True when the file holds a JSON object (first non-blank byte is '{').
bool looks_like_json(std::string_view text);

}  // namespace spanforge::io
