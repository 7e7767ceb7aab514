#include "qcforge/frame_algebra.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace qcforge {

FrameAlgebra::FrameAlgebra(std::string name, int dim, std::vector<RForm> diff)
    : name_(std::move(name)), dim_(dim), diff_(std::move(diff)) {
  if (static_cast<int>(diff_.size()) != dim_) throw FrameMismatch("need one differential per coframe element");
  for (const auto& f : diff_)
    if (f.dim() != dim_ || (!f.is_zero() && f.degree() != 2))
      throw FrameMismatch("differentials must be 2-forms on the same frame");
  brackets_.assign(static_cast<std::size_t>(dim_) * dim_ * dim_, Rational(0));
  for (int a = 0; a < dim_; ++a)
    for (const auto& [m, c] : diff_[a].terms()) {
      auto idx = mask_indices(m);
      int b = idx[0], cc = idx[1];
      brackets_[(static_cast<std::size_t>(a) * dim_ + b) * dim_ + cc] = -c;
      brackets_[(static_cast<std::size_t>(a) * dim_ + cc) * dim_ + b] = c;
    }
}

RVector FrameAlgebra::bracket(int b, int c) const {
  RVector v(dim_, Rational(0));
  for (int a = 0; a < dim_; ++a) v[a] = bracket_coeff(a, b, c);
  return v;
}

RForm mc_differential(const FrameAlgebra& alg, const RForm& a) {
  if (a.dim() != alg.dim()) throw FrameMismatch("form and algebra have different dimensions");
  RForm out(a.dim(), a.degree() + 1);
  for (const auto& [m, c] : a.terms()) {
    auto idx = mask_indices(m);
    Mask pre = 0;
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const Mask bit = Mask{1} << idx[r];
      const Mask post = m & ~pre & ~bit;
      const Rational cr = (r & 1) ? -c : c;
      for (const auto& [dm, dc] : alg.d_e(idx[r]).terms()) {
        if (dm & (pre | post)) continue;
        int s = wedge_sign(pre, dm) * wedge_sign(pre | dm, post);
        Rational t = cr * dc;
        out.add(pre | dm | post, s > 0 ? t : -t);
      }
      pre |= bit;
    }
  }
  return out;
}

JacobiReport jacobi_check(const FrameAlgebra& alg) {
  JacobiReport rep;
  for (int a = 0; a < alg.dim(); ++a) {
    RForm dd = mc_differential(alg, alg.d_e(a));
    for (const auto& [m, c] : dd.terms()) {
      auto idx = mask_indices(m);
      rep.violations.push_back({a, idx[0], idx[1], idx[2], c});
    }
  }
  rep.ok = rep.violations.empty();
  return rep;
}

// --- qc data ----------------------------------------------------------------------------------

std::array<RForm, 3> standard_omegas(int dim, const std::vector<int>& h) {
  std::array<RForm, 3> w{RForm(dim, 2), RForm(dim, 2), RForm(dim, 2)};
  for (std::size_t k = 0; k + 3 < h.size(); k += 4) {
    const int a = h[k], b = h[k + 1], c = h[k + 2], d = h[k + 3];
    w[0] += RForm::monomial(dim, {a, b}) + RForm::monomial(dim, {c, d});
    w[1] += RForm::monomial(dim, {a, c}) + RForm::monomial(dim, {d, b});
    w[2] += RForm::monomial(dim, {a, d}) + RForm::monomial(dim, {b, c});
  }
  return w;
}

QcFrameSpec::QcFrameSpec(FrameAlgebra alg, std::vector<int> horizontal, std::array<int, 3> vertical,
                         std::array<RForm, 3> omega)
    : alg_(std::move(alg)), horizontal_(std::move(horizontal)), vertical_(vertical), omega_(std::move(omega)) {
  const int n = alg_.dim();
  if (horizontal_.empty() || horizontal_.size() % 4 != 0)
    throw PreconditionError("horizontal distribution must have dimension 4n, n >= 1");
  std::set<int> seen;
  for (int i : horizontal_) seen.insert(i);
  for (int i : vertical_) seen.insert(i);
  if (static_cast<int>(seen.size()) != n || static_cast<int>(horizontal_.size()) + 3 != n || *seen.begin() < 0 ||
      *seen.rbegin() >= n)
    throw PreconditionError("horizontal and vertical indices must partition the frame");
  for (int i : horizontal_) hmask_ |= Mask{1} << i;
  for (int s = 0; s < 3; ++s) {
    if (omega_[s].dim() != n || (!omega_[s].is_zero() && omega_[s].degree() != 2))
      throw FrameMismatch("omega must be a 2-form on the frame");
    if (!(omega_[s].restrict_to(hmask_) == omega_[s])) throw PreconditionError("omega must be horizontal");
    reeb_[s] = basis_vector<Rational>(n, vertical_[s]);
    const int h = static_cast<int>(horizontal_.size());
    I_full_[s] = RMatrix(n, n);
    I_hor_[s] = RMatrix(h, h);
    for (int p = 0; p < h; ++p)
      for (int q = 0; q < h; ++q) {
        Rational w = omega_[s].component({horizontal_[p], horizontal_[q]});
        I_full_[s](horizontal_[q], horizontal_[p]) = w;
        I_hor_[s](q, p) = w;
      }
  }
}

bool QcFrameSpec::standard_reeb() const {
  for (int s = 0; s < 3; ++s)
    if (!(reeb_[s] == basis_vector<Rational>(dim(), vertical_[s]))) return false;
  return true;
}

std::vector<std::string> QcFrameSpec::invariant_violations() const {
  std::vector<std::string> out;
  const int h = static_cast<int>(horizontal_.size());
  const RMatrix id = RMatrix::identity(h);
  for (int s = 0; s < 3; ++s) {
    if (!(I_hor_[s] * I_hor_[s] == -id)) out.push_back("I" + std::to_string(s + 1) + "^2 != -id");
    if (!(I_hor_[s].transpose() * I_hor_[s] == id)) out.push_back("I" + std::to_string(s + 1) + " is not orthogonal");
  }
  if (!(I_hor_[0] * I_hor_[1] == I_hor_[2])) out.push_back("I1 I2 != I3");
  if (!(I_hor_[1] * I_hor_[0] == -I_hor_[2])) out.push_back("I2 I1 != -I3");
  return out;
}

// --- Text format ------------------------------------------------------------------------------

namespace {

enum class Tok { Number, Ident, Basis, Plus, Minus, Star, Caret, Equals, Semi, Comma, DotDot, End };

struct Token {
  Tok kind;
  std::string text;
  int col;
  int index = 0;  // 1-based for Basis
};

class Lexer {
 public:
  Lexer(std::string_view line, int lineno) : s_(line), line_(lineno) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s_.size()) {
      char c = s_[i];
      int col = static_cast<int>(i) + 1;
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t j = i;
        while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
        if (j + 1 < s_.size() && s_[j] == '/' && std::isdigit(static_cast<unsigned char>(s_[j + 1]))) {
          ++j;
          while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
        } else if (j + 1 < s_.size() && s_[j] == '.' && std::isdigit(static_cast<unsigned char>(s_[j + 1]))) {
          ++j;
          while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
        }
        out.push_back({Tok::Number, std::string(s_.substr(i, j - i)), col});
        i = j;
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i;
        while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_' || s_[j] == '(' ||
                                 s_[j] == ')' || (s_[j] == '/' && j > i) || (s_[j] == '=' && inside_parens(i, j))))
          ++j;
        std::string word(s_.substr(i, j - i));
        Token t{Tok::Ident, word, col};
        if (word.size() > 1 && word[0] == 'e' &&
            word.find_first_not_of("0123456789", 1) == std::string::npos) {
          t.kind = Tok::Basis;
          t.index = std::stoi(word.substr(1));
        }
        out.push_back(t);
        i = j;
        continue;
      }
      if (c == '.' && i + 1 < s_.size() && s_[i + 1] == '.') {
        out.push_back({Tok::DotDot, "..", col});
        i += 2;
        continue;
      }
      Tok k;
      switch (c) {
        case '+': k = Tok::Plus; break;
        case '-': k = Tok::Minus; break;
        case '*': k = Tok::Star; break;
        case '^': k = Tok::Caret; break;
        case '=': k = Tok::Equals; break;
        case ';': k = Tok::Semi; break;
        case ',': k = Tok::Comma; break;
        default: throw SyntaxError(std::string("unexpected character '") + c + "'", line_, col);
      }
      out.push_back({k, std::string(1, c), col});
      ++i;
    }
    out.push_back({Tok::End, "", static_cast<int>(s_.size()) + 1});
    return out;
  }

 private:
  // Names such as l0(c=1) keep their '=' while the parenthesis is open.
  bool inside_parens(std::size_t start, std::size_t j) const {
    int depth = 0;
    for (std::size_t k = start; k < j; ++k) depth += (s_[k] == '(') - (s_[k] == ')');
    return depth > 0;
  }
  std::string_view s_;
  int line_;
};

class LineParser {
 public:
  LineParser(std::vector<Token> toks, int line) : t_(std::move(toks)), line_(line) {}

  const Token& peek() const { return t_[p_]; }
  const Token& next() { return t_[p_ < t_.size() - 1 ? p_++ : p_]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool accept(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, peek().col); }
  [[noreturn]] void fail_at(const std::string& msg, int col) const { throw SyntaxError(msg, line_, col); }
  const Token& expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    return next();
  }
  void expect_word(const char* w) {
    if (!at(Tok::Ident) || peek().text != w) fail(std::string("expected '") + w + "'");
    next();
  }
  void expect_end() {
    if (!at(Tok::End)) fail("unexpected '" + peek().text + "'");
  }

  int basis_index(int dim) {
    const Token& t = expect(Tok::Basis, "a coframe element e<k>");
    if (t.index < 1 || t.index > dim)
      throw IndexOutOfRange("line " + std::to_string(line_) + ", column " + std::to_string(t.col) + ": e" +
                            std::to_string(t.index) + " outside frame of dimension " + std::to_string(dim));
    return t.index - 1;
  }

  RForm form(int dim, const std::map<std::string, Rational>& params) {
    if (at(Tok::Number) && peek().text == "0" && t_[p_ + 1].kind == Tok::End) {
      next();
      return RForm(dim, 2);
    }
    std::optional<RForm> out;
    bool first = true;
    while (!at(Tok::End)) {
      Rational sign(1);
      if (accept(Tok::Minus))
        sign = Rational(-1);
      else if (!accept(Tok::Plus) && !first)
        fail("expected '+' or '-'");
      first = false;
      Rational coef = sign;
      bool have_factor = false;
      while (at(Tok::Number) || at(Tok::Ident)) {
        const Token& f = next();
        if (f.kind == Tok::Number) {
          coef *= Rational::parse(f.text);
        } else {
          auto it = params.find(f.text);
          if (it == params.end()) fail_at("unknown parameter '" + f.text + "'", f.col);
          coef *= it->second;
        }
        have_factor = true;
        accept(Tok::Star);
      }
      if (!at(Tok::Basis)) {
        if (have_factor) fail("expected a monomial e<i>^e<j>...");
        fail("expected a term");
      }
      int col = peek().col;
      std::vector<int> idx{basis_index(dim)};
      while (accept(Tok::Caret)) idx.push_back(basis_index(dim));
      if (sort_sign(idx) == 0) fail_at("repeated index in monomial", col);
      RForm term = RForm::monomial(dim, idx, coef);
      if (out && out->degree() != static_cast<int>(idx.size())) fail_at("mixed degrees in one form", col);
      if (!out)
        out = term;
      else
        *out += term;
    }
    if (!out) fail("empty form");
    return *out;
  }

  std::vector<int> index_list(int dim) {
    std::vector<int> out;
    do {
      int a = basis_index(dim);
      if (accept(Tok::DotDot)) {
        int b = basis_index(dim);
        if (b < a) fail("descending range");
        for (int k = a; k <= b; ++k) out.push_back(k);
      } else {
        out.push_back(a);
      }
    } while (accept(Tok::Comma));
    return out;
  }

 private:
  std::vector<Token> t_;
  std::size_t p_ = 0;
  int line_;
};

std::string strip_comment(std::string_view line) {
  auto h = line.find('#');
  return std::string(h == std::string_view::npos ? line : line.substr(0, h));
}

}  // namespace

AlgebraFile parse_algebra_file(std::string_view source, const std::map<std::string, Rational>& overrides) {
  std::optional<std::string> name;
  int dim = 0;
  int header_line = 0;
  std::map<std::string, Rational> params;
  std::vector<std::optional<RForm>> diff;
  std::optional<std::pair<std::vector<int>, std::vector<int>>> split;
  std::array<std::optional<RForm>, 3> omegas;
  int qc_line = 0;

  std::istringstream in{std::string(source)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = strip_comment(raw);
    LineParser lp(Lexer(line, lineno).run(), lineno);
    if (lp.at(Tok::End)) continue;
    const Token head = lp.peek();
    if (head.kind != Tok::Ident) lp.fail("expected a statement");
    if (head.text == "algebra") {
      lp.next();
      if (name) lp.fail_at("second algebra header", head.col);
      if (!lp.at(Tok::Ident) && !lp.at(Tok::Basis) && !lp.at(Tok::Number)) lp.fail("expected algebra name");
      name = lp.next().text;
      lp.expect_word("dim");
      const Token& dt = lp.expect(Tok::Number, "dimension");
      if (dt.text.find_first_not_of("0123456789") != std::string::npos) lp.fail_at("dimension must be an integer", dt.col);
      dim = std::stoi(dt.text);
      if (dim < 1 || dim > kMaxFrameDim) lp.fail_at("dimension out of range", dt.col);
      lp.expect_end();
      diff.assign(dim, std::nullopt);
      header_line = lineno;
      continue;
    }
    if (head.text == "param") {
      lp.next();
      const Token& id = lp.expect(Tok::Ident, "parameter name");
      Rational value(0);
      bool has_default = false;
      if (lp.accept(Tok::Equals)) {
        bool neg = lp.accept(Tok::Minus);
        value = Rational::parse(lp.expect(Tok::Number, "rational value").text);
        if (neg) value = -value;
        has_default = true;
      }
      lp.expect_end();
      if (auto it = overrides.find(id.text); it != overrides.end())
        value = it->second;
      else if (!has_default)
        lp.fail_at("parameter '" + id.text + "' has no value", id.col);
      params[id.text] = value;
      continue;
    }
    if (!name) lp.fail("statement before 'algebra' header");
    if (head.text == "d") {
      lp.next();
      int a = lp.basis_index(dim);
      lp.expect(Tok::Equals, "'='");
      RForm f = lp.form(dim, params);
      if (f.degree() != 2 && !f.is_zero()) lp.fail_at("d e<k> must be a 2-form", head.col);
      lp.expect_end();
      if (diff[a])
        throw DuplicateDifferential("line " + std::to_string(lineno) + ": second differential for e" +
                                    std::to_string(a + 1));
      diff[a] = RForm(dim, 2) + f;
      continue;
    }
    if (head.text == "qc") {
      lp.next();
      lp.expect_word("horizontal");
      lp.expect(Tok::Equals, "'='");
      auto h = lp.index_list(dim);
      lp.expect(Tok::Semi, "';'");
      lp.expect_word("vertical");
      lp.expect(Tok::Equals, "'='");
      auto v = lp.index_list(dim);
      lp.expect_end();
      if (v.size() != 3) lp.fail_at("vertical must list exactly three elements", head.col);
      split = {h, v};
      qc_line = lineno;
      continue;
    }
    if (head.text.size() == 6 && head.text.rfind("omega", 0) == 0 && head.text[5] >= '1' && head.text[5] <= '3') {
      lp.next();
      lp.expect(Tok::Equals, "'='");
      RForm f = lp.form(dim, params);
      lp.expect_end();
      if (f.degree() != 2 && !f.is_zero()) lp.fail_at("omega must be a 2-form", head.col);
      omegas[head.text[5] - '1'] = RForm(dim, 2) + f;
      continue;
    }
    lp.fail_at("unknown statement '" + head.text + "'", head.col);
  }
  if (!name) throw SyntaxError("missing 'algebra <name> dim <n>' header", lineno + 1, 1);
  std::vector<RForm> d;
  for (int a = 0; a < dim; ++a) {
    if (!diff[a]) throw SyntaxError("no differential given for e" + std::to_string(a + 1), header_line, 1);
    d.push_back(*diff[a]);
  }
  AlgebraFile out{FrameAlgebra(*name, dim, std::move(d)), std::nullopt};

  const int given = (omegas[0] ? 1 : 0) + (omegas[1] ? 1 : 0) + (omegas[2] ? 1 : 0);
  if (given != 0 && given != 3) throw SyntaxError("give all three of omega1, omega2, omega3 or none", qc_line, 1);
  if (!split && dim >= 7 && (dim - 3) % 4 == 0) {
    std::vector<int> h, v;
    for (int a = 0; a < dim - 3; ++a) h.push_back(a);
    for (int a = dim - 3; a < dim; ++a) v.push_back(a);
    split = {h, v};
  }
  if (split) {
    auto w = given == 3 ? std::array<RForm, 3>{*omegas[0], *omegas[1], *omegas[2]} : standard_omegas(dim, split->first);
    try {
      out.qc = QcFrameSpec(out.algebra, split->first, {split->second[0], split->second[1], split->second[2]}, w);
    } catch (const PreconditionError& e) {
      throw SyntaxError(e.what(), qc_line, 1);
    }
  } else if (given) {
    throw SyntaxError("omega forms without a qc split", qc_line, 1);
  }
  return out;
}

FrameAlgebra parse_algebra(std::string_view source, const std::map<std::string, Rational>& params) {
  return parse_algebra_file(source, params).algebra;
}

QcFrameSpec parse_qc_spec(std::string_view source, const std::map<std::string, Rational>& params) {
  auto f = parse_algebra_file(source, params);
  if (!f.qc) throw PreconditionError("algebra '" + f.algebra.name() + "' carries no qc data");
  auto bad = f.qc->invariant_violations();
  if (!bad.empty()) throw PreconditionError("qc data of '" + f.algebra.name() + "' violates: " + bad.front());
  return *f.qc;
}

RForm parse_form(std::string_view text, int dim, const std::map<std::string, Rational>& params) {
  LineParser lp(Lexer(text, 1).run(), 1);
  RForm f = lp.form(dim, params);
  lp.expect_end();
  return f;
}

std::string print_algebra(const FrameAlgebra& alg, const QcFrameSpec* qc) {
  std::ostringstream os;
  os << "algebra " << alg.name() << " dim " << alg.dim() << "\n";
  for (int a = 0; a < alg.dim(); ++a) os << "d e" << a + 1 << " = " << alg.d_e(a).str() << "\n";
  if (qc) {
    os << "qc horizontal = ";
    for (std::size_t k = 0; k < qc->horizontal().size(); ++k) os << (k ? "," : "") << "e" << qc->horizontal()[k] + 1;
    os << " ; vertical = ";
    for (int s = 0; s < 3; ++s) os << (s ? "," : "") << "e" << qc->vertical()[s] + 1;
    os << "\n";
    for (int s = 0; s < 3; ++s) os << "omega" << s + 1 << " = " << qc->omega(s).str() << "\n";
  }
  return os.str();
}

}  // namespace qcforge
