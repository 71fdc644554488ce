#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vnfcons/ilp.h"

namespace vnfcons {

namespace {

constexpr std::size_t kLineWidth = 200;

std::string Number(double value) {
  if (std::isinf(value)) return value > 0 ? "+inf" : "-inf";
  if (value == 0.0) return "0";  // no "-0"
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, end);
}

// Appends " + 3 x" style terms, wrapping long rows onto indented lines.
void WriteExpression(std::string& out, std::size_t line_start,
                     const std::vector<Term>& terms, const LinearModel& model) {
  if (terms.empty()) {
    // LP rows need at least one term.
    out += " 0 " + model.variables().front().name;
    return;
  }
  bool first = true;
  for (const Term& t : terms) {
    std::string piece;
    const double mag = std::abs(t.coef);
    if (t.coef < 0 || std::signbit(t.coef)) {
      piece += "- ";
    } else if (!first) {
      piece += "+ ";
    }
    if (mag != 1.0) piece += Number(mag) + " ";
    piece += model.variables()[t.var].name;
    if (out.size() - line_start + piece.size() + 1 > kLineWidth) {
      out += "\n  ";
      line_start = out.size() - 2;
    }
    out += ' ';
    out += piece;
    first = false;
  }
}

const char* RelationText(Relation r) {
  switch (r) {
    case Relation::kLe: return "<=";
    case Relation::kGe: return ">=";
    case Relation::kEq: return "=";
  }
  return "=";
}

}  // namespace

std::string ExportLp(const LinearModel& model) {
  std::string out;
  out += "\\ VNF consolidation model\n";
  out += "Minimize\n";
  std::size_t start = out.size();
  out += " obj:";
  WriteExpression(out, start, model.objective(), model);
  out += "\nSubject To\n";
  for (const Constraint& row : model.constraints()) {
    start = out.size();
    out += " " + row.name + ":";
    WriteExpression(out, start, row.terms, model);
    out += ' ';
    out += RelationText(row.relation);
    out += ' ';
    out += Number(row.rhs);
    out += '\n';
  }
  out += "Bounds\n";
  for (const Variable& v : model.variables()) {
    if (v.kind == VarKind::kBinary) continue;
    if (std::isinf(v.upper)) {
      out += " " + v.name + " >= " + Number(v.lower) + "\n";
    } else {
      out += " " + Number(v.lower) + " <= " + v.name + " <= " + Number(v.upper) + "\n";
    }
  }
  out += "Binaries\n";
  for (const Variable& v : model.variables()) {
    if (v.kind == VarKind::kBinary) out += " " + v.name + "\n";
  }
  out += "Generals\n";
  for (const Variable& v : model.variables()) {
    if (v.kind == VarKind::kInteger) out += " " + v.name + "\n";
  }
  out += "End\n";
  return out;
}

namespace {

enum class Section { kNone, kObjective, kConstraints, kBounds, kBinaries, kGenerals, kEnd };

std::vector<std::string_view> Tokens(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<double> ParseNumber(std::string_view s) {
  if (s == "+inf" || s == "inf" || s == "+infinity" || s == "infinity") {
    return kInfinity;
  }
  if (s == "-inf" || s == "-infinity") return -kInfinity;
  double value = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  auto [end, ec] = std::from_chars(first, s.data() + s.size(), value);
  if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
  return value;
}

std::optional<Relation> ParseRelation(std::string_view s) {
  if (s == "<=" || s == "=<" || s == "<") return Relation::kLe;
  if (s == ">=" || s == "=>" || s == ">") return Relation::kGe;
  if (s == "=") return Relation::kEq;
  return std::nullopt;
}

class LpReader {
 public:
  explicit LpReader(std::string_view text) { Split(text); }

  LinearModel Read() {
    // Declarations first so that variable order follows the Bounds and
    // Binaries sections rather than first use.
    for (const auto& [number, text] : sections_[Section::kBounds]) ReadBound(number, text);
    for (const auto& [number, text] : sections_[Section::kBinaries]) {
      for (std::string_view name : Tokens(text)) {
        Declare(name, VarKind::kBinary, 0.0, 1.0, number);
      }
    }
    for (const auto& [number, text] : sections_[Section::kGenerals]) {
      for (std::string_view name : Tokens(text)) {
        auto id = model_.FindVariable(name);
        if (!id) throw Error(number, "general variable without bounds");
        kinds_[*id] = VarKind::kInteger;
      }
    }
    LinearModel out;
    for (std::size_t j = 0; j < model_.variables().size(); ++j) {
      const Variable& v = model_.variables()[j];
      out.AddVariable(v.name, kinds_[j], v.lower, v.upper);
    }
    model_ = std::move(out);

    auto rows = Statements(Section::kObjective);
    if (rows.size() > 1) throw ParseError("LP: more than one objective");
    if (!rows.empty()) {
      Constraint obj = ReadRow(rows.front(), /*objective=*/true);
      model_.SetObjective(std::move(obj.terms));
    }
    for (const auto& stmt : Statements(Section::kConstraints)) {
      Constraint row = ReadRow(stmt, /*objective=*/false);
      model_.AddConstraint(std::move(row.name), std::move(row.terms),
                           row.relation, row.rhs);
    }
    return std::move(model_);
  }

 private:
  struct Statement {
    int line;
    std::vector<std::string_view> tokens;
  };

  static ParseError Error(int line, const std::string& what) {
    return ParseError("LP line " + std::to_string(line) + ": " + what);
  }

  void Split(std::string_view text) {
    Section current = Section::kNone;
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text.size() && current != Section::kEnd) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string_view::npos) eol = text.size();
      std::string_view line = text.substr(pos, eol - pos);
      pos = eol + 1;
      ++number;
      if (auto c = line.find('\\'); c != std::string_view::npos) line = line.substr(0, c);
      auto tokens = Tokens(line);
      if (tokens.empty()) {
        if (eol == text.size()) break;
        continue;
      }
      std::string head;
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) head += ' ';
        for (char ch : tokens[i]) head += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      }
      if (head == "minimize" || head == "minimise" || head == "min") {
        current = Section::kObjective;
      } else if (head == "maximize" || head == "maximise" || head == "max") {
        throw Error(number, "only minimization models are supported");
      } else if (head == "subject to" || head == "such that" || head == "st" ||
                 head == "s.t.") {
        current = Section::kConstraints;
      } else if (head == "bounds") {
        current = Section::kBounds;
      } else if (head == "binaries" || head == "binary" || head == "bin") {
        current = Section::kBinaries;
      } else if (head == "generals" || head == "general" || head == "gen") {
        current = Section::kGenerals;
      } else if (head == "end") {
        current = Section::kEnd;
      } else if (current == Section::kNone) {
        throw Error(number, "text before the objective section");
      } else {
        sections_[current].push_back({number, line});
      }
      if (eol == text.size()) break;
    }
  }

  // Groups a section's lines into statements, each starting with "name:".
  std::vector<Statement> Statements(Section section) {
    std::vector<Statement> out;
    for (const auto& [number, text] : sections_[section]) {
      for (std::string_view tok : Tokens(text)) {
        if (tok.size() > 1 && tok.back() == ':') {
          out.push_back({number, {tok}});
        } else {
          if (out.empty()) throw Error(number, "row without a name");
          out.back().tokens.push_back(tok);
        }
      }
    }
    return out;
  }

  Constraint ReadRow(const Statement& stmt, bool objective) {
    Constraint row;
    row.name = std::string(stmt.tokens.front().substr(0, stmt.tokens.front().size() - 1));
    std::size_t i = 1;
    const std::size_t n = stmt.tokens.size();
    bool have_relation = false;
    while (i < n) {
      if (auto rel = ParseRelation(stmt.tokens[i])) {
        if (objective) throw Error(stmt.line, "relation in the objective");
        if (i + 2 != n) throw Error(stmt.line, "expected a single right-hand side");
        auto rhs = ParseNumber(stmt.tokens[i + 1]);
        if (!rhs) throw Error(stmt.line, "bad right-hand side");
        row.relation = *rel;
        row.rhs = *rhs;
        have_relation = true;
        break;
      }
      double sign = 1.0;
      if (stmt.tokens[i] == "+" || stmt.tokens[i] == "-") {
        if (stmt.tokens[i] == "-") sign = -1.0;
        ++i;
      }
      if (i >= n) throw Error(stmt.line, "dangling sign");
      double coef = 1.0;
      if (auto num = ParseNumber(stmt.tokens[i])) {
        coef = *num;
        ++i;
      }
      if (i >= n) throw Error(stmt.line, "coefficient without a variable");
      auto id = model_.FindVariable(stmt.tokens[i]);
      if (!id) {
        throw Error(stmt.line, "undeclared variable '" + std::string(stmt.tokens[i]) + "'");
      }
      row.terms.push_back({*id, sign * coef});
      ++i;
    }
    if (!objective && !have_relation) throw Error(stmt.line, "row without a relation");
    // The writer emits "0 v" for rows without terms.
    if (row.terms.size() == 1 && row.terms[0].coef == 0.0 && row.terms[0].var == 0) {
      row.terms.clear();
    }
    return row;
  }

  void ReadBound(int number, std::string_view text) {
    auto t = Tokens(text);
    if (t.size() == 5) {
      auto lo = ParseNumber(t[0]);
      auto hi = ParseNumber(t[4]);
      if (!lo || !hi || t[1] != "<=" || t[3] != "<=") throw Error(number, "bad bound");
      Declare(t[2], VarKind::kContinuous, *lo, *hi, number);
    } else if (t.size() == 3) {
      auto value = ParseNumber(t[2]);
      if (!value) throw Error(number, "bad bound");
      if (t[1] == ">=") {
        Declare(t[0], VarKind::kContinuous, *value, kInfinity, number);
      } else if (t[1] == "<=") {
        Declare(t[0], VarKind::kContinuous, 0.0, *value, number);
      } else if (t[1] == "=") {
        Declare(t[0], VarKind::kContinuous, *value, *value, number);
      } else {
        throw Error(number, "bad bound");
      }
    } else if (t.size() == 2 && (t[1] == "free" || t[1] == "Free")) {
      Declare(t[0], VarKind::kContinuous, -kInfinity, kInfinity, number);
    } else {
      throw Error(number, "bad bound");
    }
  }

  void Declare(std::string_view name, VarKind kind, double lo, double hi, int number) {
    if (model_.FindVariable(name)) {
      throw Error(number, "variable '" + std::string(name) + "' declared twice");
    }
    model_.AddVariable(std::string(name), kind, lo, hi);
    kinds_.push_back(kind);
  }

  std::map<Section, std::vector<std::pair<int, std::string_view>>> sections_;
  LinearModel model_;
  std::vector<VarKind> kinds_;
};

}  // namespace

LinearModel ParseLp(std::string_view text) { return LpReader(text).Read(); }

}  // namespace vnfcons
