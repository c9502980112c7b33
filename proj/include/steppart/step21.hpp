// Copyright 2026 The steppart Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace steppart {

/// One ISO 10303-21 parameter value. Lists nest; typed values keep their
/// wrapping keyword (e.g. PARAMETER_VALUE(0.5)).
struct PValue {
  enum class Kind { Unset, Derived, Integer, Real, String, Enum, Ref, List, Typed };

  Kind kind = Kind::Unset;
  std::int64_t integer = 0;   // Kind::Integer, Kind::Ref
  double real = 0.0;          // Kind::Real
  std::string text;           // Kind::String (decoded), Kind::Enum (no dots), Kind::Typed (keyword)
  std::vector<PValue> list;   // Kind::List, Kind::Typed (args)

  static PValue unset() { return {}; }
  static PValue derived() {
    PValue v;
    v.kind = Kind::Derived;
    return v;
  }
  static PValue makeInt(std::int64_t n) {
    PValue v;
    v.kind = Kind::Integer;
    v.integer = n;
    return v;
  }
  static PValue makeReal(double r) {
    PValue v;
    v.kind = Kind::Real;
    v.real = r;
    return v;
  }
  static PValue makeRef(std::int64_t id) {
    PValue v;
    v.kind = Kind::Ref;
    v.integer = id;
    return v;
  }

  bool isRef() const { return kind == Kind::Ref; }
  bool isList() const { return kind == Kind::List; }
  bool isNumber() const { return kind == Kind::Integer || kind == Kind::Real; }
  double asReal() const { return kind == Kind::Integer ? double(integer) : real; }

  bool operator==(const PValue& o) const;
};

/// A single keyword + argument list. Plain entities have one of these;
/// complex (multi-keyword) instances have several.
struct SimpleRecord {
  std::string keyword;
  std::vector<PValue> args;

  bool operator==(const SimpleRecord& o) const {
    return keyword == o.keyword && args == o.args;
  }
};

struct EntityRecord {
  std::int64_t id = 0;
  bool complex = false;
  std::vector<SimpleRecord> records;  // exactly one unless complex

  const std::string& keyword() const { return records.front().keyword; }
  const std::vector<PValue>& args() const { return records.front().args; }

  /// True if any constituent record carries the keyword.
  bool is(std::string_view kw) const;
  /// Args of the constituent with the keyword, or nullptr.
  const std::vector<PValue>* find(std::string_view kw) const;

  bool operator==(const EntityRecord& o) const {
    return id == o.id && complex == o.complex && records == o.records;
  }
};

struct StepHeader {
  std::vector<SimpleRecord> records;  // FILE_DESCRIPTION, FILE_NAME, FILE_SCHEMA, ...

  std::string description() const;
  std::string name() const;
  std::string schema() const;

  bool operator==(const StepHeader& o) const { return records == o.records; }
};

struct StepEntityGraph {
  StepHeader header;
  std::map<std::int64_t, EntityRecord> entities;

  const EntityRecord& at(std::int64_t id) const;
  const EntityRecord* get(std::int64_t id) const;

  bool operator==(const StepEntityGraph& o) const {
    return header == o.header && entities == o.entities;
  }
};

/// Parse an ISO 10303-21 exchange file. Unsupported keywords are retained as
/// opaque records. Throws steppart::Error (stage "parse") on malformed syntax,
/// unresolved #id references, or a missing DATA section.
StepEntityGraph parseStep(std::string_view bytes);

/// Re-emit a graph as Part-21 text. parseStep(serializeStep(g)) == g.
std::string serializeStep(const StepEntityGraph& graph);

/// Exact histogram of entity keywords (complex records contribute every
/// constituent keyword).
std::map<std::string, std::int64_t> entityStats(const StepEntityGraph& graph);

}  // namespace steppart
