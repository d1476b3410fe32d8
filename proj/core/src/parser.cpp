#include "taxalign/parser.hpp"

#include <map>
#include <sstream>

namespace taxalign {

namespace {

constexpr std::string_view kSpace = " \t\r\f\v";

bool is_space(char c) { return kSpace.find(c) != std::string_view::npos; }

bool is_name_char(char c) {
  switch (c) {
    case '(':
    case ')':
    case '[':
    case ']':
    case '{':
    case '}':
    case ',':
    case '#':
    case '\0':
      return false;
    default:
      return !is_space(c) && c != '\n';
  }
}

struct Token {
  std::string_view text;
  std::size_t offset = 0;  // 0-based column within the line
};

// Splits `body` (located at `base` within its line) on whitespace and, when
// `commas` is set, on commas too.
std::vector<Token> split(std::string_view body, std::size_t base, bool commas = false) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto sep = [&](char c) { return is_space(c) || (commas && c == ','); };
  while (i < body.size()) {
    while (i < body.size() && sep(body[i])) ++i;
    std::size_t start = i;
    while (i < body.size() && !sep(body[i])) ++i;
    if (i > start) out.push_back({body.substr(start, i - start), base + start});
  }
  return out;
}

struct PendingArticulation {
  std::size_t index;
  Token left;
  Token relation;
  Token right;
  RelationMask mask;
  std::string source;
  std::size_t line;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ParseResult run(ConstraintFlags flags) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      auto nl = text_.find('\n', pos);
      std::string_view line = text_.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      ++line_no;
      line_ = line;
      line_no_ = line_no;
      parse_line();
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    finish();

    ParseResult result;
    result.errors = std::move(errors_);
    if (result.errors.empty()) {
      alignment_.flags = flags;
      result.alignment = std::move(alignment_);
    }
    return result;
  }

 private:
  SourceSpan span(std::size_t begin, std::size_t end) const {
    if (end <= begin) end = begin + 1;
    std::size_t clamp_end = std::min(end, line_.size());
    std::string raw = begin < line_.size() ? std::string(line_.substr(begin, clamp_end - begin)) : "";
    return {line_no_, begin + 1, end + 1, std::move(raw)};
  }
  SourceSpan span(const Token& t) const { return span(t.offset, t.offset + t.text.size()); }

  void error(ParseError::Kind kind, SourceSpan where, std::string message) {
    errors_.push_back({kind, std::move(where), std::move(message)});
  }

  void parse_line() {
    std::string_view body = line_;
    if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    std::size_t begin = 0;
    while (begin < body.size() && is_space(body[begin])) ++begin;
    std::size_t end = body.size();
    while (end > begin && is_space(body[end - 1])) --end;
    if (begin == end) return;
    std::string_view content = body.substr(begin, end - begin);

    if (content.front() == '(') {
      parse_tree_line(content, begin);
    } else if (content.front() == '[') {
      parse_articulation(content, begin);
    } else {
      auto tokens = split(content, begin);
      if (tokens.front().text == "taxonomy") {
        parse_taxonomy_header(tokens, content, begin);
      } else if (tokens.front().text == "articulations" && tokens.size() == 1) {
        in_articulations_ = true;
      } else {
        error(ParseError::Kind::kLexical, span(tokens.front()),
              "unexpected token '" + std::string(tokens.front().text) + "'");
      }
    }
  }

  void parse_taxonomy_header(const std::vector<Token>& tokens, std::string_view content, std::size_t base) {
    if (tokens.size() < 2) {
      error(ParseError::Kind::kLexical, span(tokens.front()), "taxonomy header needs an id");
      return;
    }
    const Token& id_tok = tokens[1];
    int id = 0;
    if (id_tok.text == "1") {
      id = 1;
    } else if (id_tok.text == "2") {
      id = 2;
    } else {
      error(ParseError::Kind::kUnknownTaxonomy, span(id_tok),
            "taxonomy id must be 1 or 2, got '" + std::string(id_tok.text) + "'");
      current_ = 0;
      return;
    }
    if (seen_[id]) {
      error(ParseError::Kind::kStructure, span(id_tok), "taxonomy " + std::to_string(id) + " declared twice");
      current_ = 0;
      return;
    }
    std::string label;
    if (tokens.size() > 2) {
      std::size_t from = tokens[2].offset - base;
      label = std::string(content.substr(from));
    }
    seen_[id] = true;
    header_span_[id] = span(tokens.front().offset, base + content.size());
    (id == 1 ? alignment_.first : alignment_.second) = Taxonomy(id, std::move(label));
    current_ = id;
    in_articulations_ = false;
  }

  bool check_names(const std::vector<Token>& tokens) {
    bool ok = true;
    for (const auto& t : tokens) {
      for (std::size_t i = 0; i < t.text.size(); ++i) {
        if (!is_name_char(t.text[i])) {
          error(ParseError::Kind::kLexical, span(t.offset + i, t.offset + i + 1),
                "invalid character in concept name '" + std::string(t.text) + "'");
          ok = false;
          break;
        }
      }
    }
    return ok;
  }

  void parse_tree_line(std::string_view content, std::size_t base) {
    if (content.back() != ')') {
      error(ParseError::Kind::kLexical, span(base + content.size() - 1, base + content.size()),
            "tree line must end with ')'");
      return;
    }
    if (in_articulations_ || current_ == 0) {
      error(ParseError::Kind::kStructure, span(base, base + content.size()),
            "tree line outside a taxonomy section");
      return;
    }
    auto tokens = split(content.substr(1, content.size() - 2), base + 1);
    if (tokens.empty()) {
      error(ParseError::Kind::kLexical, span(base, base + content.size()), "empty tree line");
      return;
    }
    if (!check_names(tokens)) return;
    Taxonomy& tax = current_ == 1 ? alignment_.first : alignment_.second;
    std::string parent(tokens.front().text);
    tax.add_concept(parent);
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      std::string child(tokens[i].text);
      if (child == parent) {
        error(ParseError::Kind::kCycle, span(tokens[i]), "concept '" + child + "' is its own parent");
        continue;
      }
      if (!tax.add_edge(parent, child)) {
        error(ParseError::Kind::kDuplicateChild, span(tokens[i]),
              "concept " + concept_key(current_, child) + " already has a parent");
        continue;
      }
      edge_span_[current_][child] = span(tokens[i]);
    }
  }

  void parse_articulation(std::string_view content, std::size_t base) {
    if (content.back() != ']') {
      error(ParseError::Kind::kLexical, span(base + content.size() - 1, base + content.size()),
            "articulation must end with ']'");
      return;
    }
    std::string_view inner = content.substr(1, content.size() - 2);
    std::size_t inner_base = base + 1;

    std::optional<Token> braces;
    auto open = inner.find('{');
    auto close = inner.find('}');
    std::vector<Token> keys;
    if (open != std::string_view::npos || close != std::string_view::npos) {
      if (open == std::string_view::npos || close == std::string_view::npos || close < open ||
          inner.find('{', open + 1) != std::string_view::npos ||
          inner.find('}', close + 1) != std::string_view::npos) {
        error(ParseError::Kind::kLexical, span(base, base + content.size()), "unbalanced relation braces");
        return;
      }
      braces = Token{inner.substr(open, close - open + 1), inner_base + open};
      auto before = split(inner.substr(0, open), inner_base);
      auto after = split(inner.substr(close + 1), inner_base + close + 1);
      if (before.size() != 1 || after.size() != 1) {
        error(ParseError::Kind::kLexical, span(base, base + content.size()),
              "articulation must be [<key> <relation> <key>]");
        return;
      }
      keys = {before[0], after[0]};
    } else {
      auto tokens = split(inner, inner_base);
      if (tokens.size() != 3) {
        error(ParseError::Kind::kLexical, span(base, base + content.size()),
              "articulation must be [<key> <relation> <key>]");
        return;
      }
      keys = {tokens[0], tokens[2]};
      braces = tokens[1];
    }
    if (!check_names(keys)) return;

    RelationMask mask;
    const Token& rel = *braces;
    bool braced = rel.text.front() == '{';
    std::vector<Token> rel_tokens =
        braced ? split(rel.text.substr(1, rel.text.size() - 2), rel.offset + 1, true) : std::vector<Token>{rel};
    if (rel_tokens.empty()) {
      error(ParseError::Kind::kEmptyRelation, span(rel), "empty relation set");
      return;
    }
    for (const auto& t : rel_tokens) {
      auto r = parse_relation_token(t.text);
      if (!r) {
        error(ParseError::Kind::kLexical, span(t), "unknown relation '" + std::string(t.text) + "'");
        return;
      }
      mask |= *r;
    }
    pending_.push_back({pending_.size(), keys[0], rel, keys[1], mask, std::string(content), line_no_});
    pending_spans_.push_back(span(base, base + content.size()));
  }

  void finish() {
    for (int id : {1, 2}) {
      if (!seen_[id]) {
        SourceSpan where{line_no_, 1, 2, ""};
        error(ParseError::Kind::kStructure, where, "missing taxonomy " + std::to_string(id));
        continue;
      }
      const Taxonomy& tax = alignment_.taxonomy(id);
      if (tax.size() == 0) {
        error(ParseError::Kind::kStructure, header_span_[id], "taxonomy " + std::to_string(id) + " has no concepts");
        continue;
      }
      if (auto cycle = tax.find_cycle(); !cycle.empty()) {
        std::string members;
        for (const auto& c : cycle) members += (members.empty() ? "" : " ") + concept_key(id, c);
        error(ParseError::Kind::kCycle, edge_span_[id][cycle.front()], "is_a cycle: " + members);
      }
      auto roots = tax.roots();
      if (roots.size() > 1) {
        std::string names;
        for (const auto& r : roots) names += (names.empty() ? "" : " ") + concept_key(id, r);
        error(ParseError::Kind::kStructure, header_span_[id], "taxonomy has several roots: " + names);
      }
    }

    for (std::size_t k = 0; k < pending_.size(); ++k) {
      auto& p = pending_[k];
      line_no_ = p.line;
      auto resolve = [&](const Token& t) -> std::optional<std::pair<int, std::string>> {
        auto split_key = split_concept_key(t.text);
        if (!split_key || (split_key->first != 1 && split_key->first != 2)) {
          error(ParseError::Kind::kUnknownTaxonomy, with_line(t, p.line),
                "'" + std::string(t.text) + "' is not a key of taxonomy 1 or 2");
          return std::nullopt;
        }
        if (seen_[split_key->first] && !alignment_.taxonomy(split_key->first).contains(split_key->second)) {
          error(ParseError::Kind::kUnknownConcept, with_line(t, p.line),
                "unknown concept " + std::string(t.text));
          return std::nullopt;
        }
        return split_key;
      };
      auto left = resolve(p.left);
      auto right = resolve(p.right);
      if (!left || !right) continue;
      if (left->first == right->first) {
        error(ParseError::Kind::kStructure, pending_spans_[k],
              "articulation must relate concepts of different taxonomies");
        continue;
      }
      Articulation art;
      art.index = p.index;
      art.source = p.source;
      art.span = pending_spans_[k];
      if (left->first == 1) {
        art.left = left->second;
        art.right = right->second;
        art.mask = p.mask;
      } else {
        art.left = right->second;
        art.right = left->second;
        art.mask = converse(p.mask);
      }
      alignment_.articulations.push_back(std::move(art));
    }
  }

  SourceSpan with_line(const Token& t, std::size_t line) const {
    return {line, t.offset + 1, t.offset + t.text.size() + 1, std::string(t.text)};
  }

  std::string_view text_;
  std::string_view line_;
  std::size_t line_no_ = 0;
  int current_ = 0;
  bool in_articulations_ = false;
  bool seen_[3] = {false, false, false};
  SourceSpan header_span_[3];
  std::map<std::string, SourceSpan> edge_span_[3];
  std::vector<PendingArticulation> pending_;
  std::vector<SourceSpan> pending_spans_;
  Alignment alignment_;
  std::vector<ParseError> errors_;
};

void write_tree(std::ostream& os, const Taxonomy& t, const std::string& node) {
  auto kids = t.children(node);
  if (kids.empty()) return;
  os << '(' << node;
  for (const auto& k : kids) os << ' ' << k;
  os << ")\n";
  for (const auto& k : kids) write_tree(os, t, k);
}

}  // namespace

std::string_view to_string(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::kLexical:
      return "lexical";
    case ParseError::Kind::kDuplicateChild:
      return "duplicate-child";
    case ParseError::Kind::kCycle:
      return "cycle";
    case ParseError::Kind::kUnknownTaxonomy:
      return "unknown-taxonomy";
    case ParseError::Kind::kUnknownConcept:
      return "unknown-concept";
    case ParseError::Kind::kEmptyRelation:
      return "empty-relation";
    case ParseError::Kind::kStructure:
      return "structure";
  }
  return "unknown";
}

std::string format_error(const ParseError& e) {
  return std::to_string(e.span.line) + ":" + std::to_string(e.span.column_begin) + ": " +
         std::string(to_string(e.kind)) + ": " + e.message;
}

ParseResult parse_alignment(std::string_view text, ConstraintFlags flags) {
  return Parser(text).run(flags);
}

std::string serialize_alignment(const Alignment& a) {
  std::ostringstream os;
  for (const Taxonomy* t : {&a.first, &a.second}) {
    os << "taxonomy " << t->id();
    if (!t->label().empty()) os << ' ' << t->label();
    os << '\n';
    for (const auto& root : t->roots()) {
      if (t->is_leaf(root))
        os << '(' << root << ")\n";
      else
        write_tree(os, *t, root);
    }
  }
  os << "articulations\n";
  for (const auto& art : a.articulations) os << art.text() << '\n';
  return os.str();
}

}  // namespace taxalign
