//
// Copyright 2026 The pdmarket Authors
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
//

#include "pdmarket/query.h"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "pdmarket/errors.h"

namespace pdmarket {
namespace {

bool IsIdentStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool IsIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
         c == '-';
}
bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }

// Splits the query into clause substrings at top-level AND / && separators,
// honoring double quotes.
std::vector<std::string> SplitClauses(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  bool in_quotes = false;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (in_quotes) {
      current += c;
      if (c == '\\' && i + 1 < text.size()) {
        current += text[i + 1];
        i += 2;
        continue;
      }
      if (c == '"') in_quotes = false;
      ++i;
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      current += c;
      ++i;
      continue;
    }
    if (c == '&' && i + 1 < text.size() && text[i + 1] == '&') {
      out.push_back(current);
      current.clear();
      i += 2;
      continue;
    }
    if ((c == 'A' || c == 'a') && i + 2 < text.size() &&
        (text[i + 1] == 'N' || text[i + 1] == 'n') &&
        (text[i + 2] == 'D' || text[i + 2] == 'd') &&
        (i == 0 || !IsIdentChar(text[i - 1])) &&
        (i + 3 == text.size() || !IsIdentChar(text[i + 3]))) {
      out.push_back(current);
      current.clear();
      i += 3;
      continue;
    }
    current += c;
    ++i;
  }
  if (in_quotes) throw ParseError("unterminated quote in query");
  out.push_back(current);
  return out;
}

struct Cursor {
  std::string_view text;
  size_t pos = 0;

  void SkipSpace() {
    while (pos < text.size() && IsSpace(text[pos])) ++pos;
  }
  bool Done() const { return pos >= text.size(); }
  char Peek() const { return text[pos]; }
};

std::string ReadValueToken(Cursor& c, std::string_view stop_chars) {
  c.SkipSpace();
  if (c.Done()) throw ParseError("expected a value in query clause");
  if (c.Peek() == '"') {
    ++c.pos;
    std::string out;
    while (!c.Done() && c.Peek() != '"') {
      if (c.Peek() == '\\' && c.pos + 1 < c.text.size()) {
        ++c.pos;
        out += c.text[c.pos];
        ++c.pos;
        continue;
      }
      out += c.text[c.pos];
      ++c.pos;
    }
    if (c.Done()) throw ParseError("unterminated quote in query");
    ++c.pos;  // closing quote
    return out;
  }
  std::string out;
  while (!c.Done() && !IsSpace(c.Peek()) &&
         stop_chars.find(c.Peek()) == std::string_view::npos) {
    char ch = c.Peek();
    if (ch == '"' || ch == '{' || ch == '}' || ch == '=') {
      throw ParseError(std::string("unexpected '") + ch + "' in bare value");
    }
    out += ch;
    ++c.pos;
  }
  if (out.empty()) throw ParseError("empty value in query clause");
  return out;
}

Clause ParseClause(const std::string& text) {
  Cursor c{text};
  c.SkipSpace();
  if (c.Done()) throw ParseError("empty clause in query");
  if (!IsIdentStart(c.Peek())) {
    throw ParseError("clause must start with an attribute name: \"" + text +
                     "\"");
  }
  size_t start = c.pos;
  while (!c.Done() && IsIdentChar(c.Peek())) ++c.pos;
  Clause clause;
  clause.attribute = std::string(c.text.substr(start, c.pos - start));
  c.SkipSpace();
  if (c.Done()) throw ParseError("clause has no operator: \"" + text + "\"");

  if (c.Peek() == '!' || c.Peek() == '=') {
    if (c.Peek() == '!') {
      ++c.pos;
      if (c.Done() || c.Peek() != '=') {
        throw ParseError("expected != in clause: \"" + text + "\"");
      }
      ++c.pos;
      clause.op = ClauseOp::kNe;
    } else {
      ++c.pos;
      if (!c.Done() && c.Peek() == '=') ++c.pos;  // == alias
      clause.op = ClauseOp::kEq;
    }
    clause.values.push_back(ReadValueToken(c, ",{}"));
    c.SkipSpace();
    if (!c.Done()) {
      throw ParseError("trailing characters in clause: \"" + text + "\"");
    }
    return clause;
  }

  // "in {...}" form.
  if ((c.Peek() == 'i' || c.Peek() == 'I') && c.pos + 1 < c.text.size() &&
      (c.text[c.pos + 1] == 'n' || c.text[c.pos + 1] == 'N')) {
    c.pos += 2;
    clause.op = ClauseOp::kIn;
    c.SkipSpace();
    if (c.Done() || c.Peek() != '{') {
      throw ParseError("expected { after 'in': \"" + text + "\"");
    }
    ++c.pos;
    while (true) {
      clause.values.push_back(ReadValueToken(c, ",}"));
      c.SkipSpace();
      if (c.Done()) throw ParseError("unterminated in-list: \"" + text + "\"");
      if (c.Peek() == ',') {
        ++c.pos;
        continue;
      }
      if (c.Peek() == '}') {
        ++c.pos;
        break;
      }
      throw ParseError("expected , or } in in-list: \"" + text + "\"");
    }
    c.SkipSpace();
    if (!c.Done()) {
      throw ParseError("trailing characters in clause: \"" + text + "\"");
    }
    return clause;
  }

  throw ParseError("unknown operator in clause: \"" + text + "\"");
}

bool NeedsQuoting(const std::string& v) {
  if (v.empty()) return true;
  for (char ch : v) {
    if (IsSpace(ch) || ch == ',' || ch == '{' || ch == '}' || ch == '"' ||
        ch == '=' || ch == '!' || ch == '&') {
      return true;
    }
  }
  return false;
}

std::string RenderValue(const std::string& v) {
  if (!NeedsQuoting(v)) return v;
  std::string out = "\"";
  for (char ch : v) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  out += '"';
  return out;
}

// Numeric tokens compare numerically against numeric attribute values.
bool TokenMatchesValue(const std::string& token, const Value& value) {
  if (!value.is_number()) return token == value.text();
  double parsed = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, parsed);
  if (ec != std::errc() || ptr != last) return false;
  return parsed == value.number();
}

}  // namespace

CountQuery CountQuery::Parse(std::string_view text) {
  std::vector<Clause> clauses;
  for (const std::string& part : SplitClauses(text)) {
    clauses.push_back(ParseClause(part));
  }
  return FromClauses(std::move(clauses));
}

CountQuery CountQuery::FromClauses(std::vector<Clause> clauses) {
  if (clauses.empty()) throw ParseError("query has no clauses");
  for (Clause& cl : clauses) {
    if (cl.attribute.empty()) throw ParseError("clause without attribute");
    if (cl.op == ClauseOp::kIn) {
      if (cl.values.empty()) throw ParseError("empty in-list");
      std::sort(cl.values.begin(), cl.values.end());
      cl.values.erase(std::unique(cl.values.begin(), cl.values.end()),
                      cl.values.end());
    } else if (cl.values.size() != 1) {
      throw ParseError("clause needs exactly one value");
    }
  }
  auto less = [](const Clause& a, const Clause& b) {
    if (a.attribute != b.attribute) return a.attribute < b.attribute;
    if (a.op != b.op) return static_cast<int>(a.op) < static_cast<int>(b.op);
    return a.values < b.values;
  };
  std::sort(clauses.begin(), clauses.end(), less);
  clauses.erase(std::unique(clauses.begin(), clauses.end()), clauses.end());
  CountQuery q;
  q.clauses_ = std::move(clauses);
  return q;
}

std::string CountQuery::canonical_text() const {
  std::string out;
  for (size_t i = 0; i < clauses_.size(); ++i) {
    if (i > 0) out += " AND ";
    const Clause& cl = clauses_[i];
    out += cl.attribute;
    switch (cl.op) {
      case ClauseOp::kEq:
        out += "=" + RenderValue(cl.values[0]);
        break;
      case ClauseOp::kNe:
        out += "!=" + RenderValue(cl.values[0]);
        break;
      case ClauseOp::kIn: {
        out += " in {";
        for (size_t j = 0; j < cl.values.size(); ++j) {
          if (j > 0) out += ",";
          out += RenderValue(cl.values[j]);
        }
        out += "}";
        break;
      }
    }
  }
  return out;
}

QueryKey CanonicalQueryKey(const CountQuery& query) {
  return query.canonical_text();
}

bool Matches(const CountQuery& query, const DataOwner& owner) {
  for (const Clause& cl : query.clauses()) {
    auto it = owner.attributes.find(cl.attribute);
    if (it == owner.attributes.end()) return false;
    const Value& value = it->second;
    bool any = false;
    for (const std::string& token : cl.values) {
      if (TokenMatchesValue(token, value)) {
        any = true;
        break;
      }
    }
    bool holds = (cl.op == ClauseOp::kNe) ? !any : any;
    if (!holds) return false;
  }
  return true;
}

void CheckQuerySchema(const CountQuery& query, const Dataset& dataset) {
  for (const Clause& cl : query.clauses()) {
    if (!dataset.HasAttribute(cl.attribute)) {
      throw SchemaError("query names unknown attribute \"" + cl.attribute +
                        "\"");
    }
  }
}

double EvaluateQuery(const CountQuery& query, const Dataset& dataset) {
  CheckQuerySchema(query, dataset);
  int64_t count = 0;
  for (const DataOwner& o : dataset.owners()) {
    if (Matches(query, o)) ++count;
  }
  return static_cast<double>(count);
}

}  // namespace pdmarket
