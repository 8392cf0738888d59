#include "quadcount/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "quadcount/error.hpp"

namespace quadcount {

QuadraticPolynomial::QuadraticPolynomial(int n, std::vector<i64> matrix, std::vector<i64> linear,
                                         i64 constant)
    : n_(n), matrix_(std::move(matrix)), linear_(std::move(linear)), constant_(constant) {
  if (n_ < 1) throw Error(ErrorCode::malformed_input, "dimension must be positive");
  if (matrix_.size() != static_cast<std::size_t>(n_) * n_) {
    throw Error(ErrorCode::malformed_input, "M must have n*n entries");
  }
  if (linear_.empty()) linear_.assign(n_, 0);
  if (linear_.size() != static_cast<std::size_t>(n_)) {
    throw Error(ErrorCode::malformed_input, "l must have n entries");
  }
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      if (m(i, j) != m(j, i)) {
        throw Error(ErrorCode::asymmetric_matrix,
                    "M(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") != M(" +
                        std::to_string(j + 1) + "," + std::to_string(i + 1) + ")");
      }
    }
  }
}

bool QuadraticPolynomial::is_diagonal() const {
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      if (i != j && m(i, j) != 0) return false;
    }
  }
  return true;
}

bool QuadraticPolynomial::is_homogeneous() const {
  return constant_ == 0 && std::all_of(linear_.begin(), linear_.end(), [](i64 v) { return v == 0; });
}

i64 QuadraticPolynomial::norm() const {
  i64 best = 0;
  for (i64 v : matrix_) best = std::max(best, v < 0 ? -v : v);
  return best;
}

i128 QuadraticPolynomial::quadratic_part(std::span<const i64> x) const {
  i128 total = 0;
  for (int i = 0; i < n_; ++i) {
    i128 row = 0;
    for (int j = 0; j < n_; ++j) row += static_cast<i128>(m(i, j)) * x[j];
    total += row * x[i];
  }
  return total;
}

i128 QuadraticPolynomial::evaluate(std::span<const i64> x) const {
  i128 total = quadratic_part(x) + constant_;
  for (int i = 0; i < n_; ++i) total += static_cast<i128>(linear_[i]) * x[i];
  return total;
}

double QuadraticPolynomial::quadratic_real(std::span<const double> x) const {
  double total = 0.0;
  for (int i = 0; i < n_; ++i) {
    double row = 0.0;
    for (int j = 0; j < n_; ++j) row += static_cast<double>(m(i, j)) * x[j];
    total += row * x[i];
  }
  return total;
}

double QuadraticPolynomial::evaluate_real(std::span<const double> x) const {
  double total = quadratic_real(x) + static_cast<double>(constant_);
  for (int i = 0; i < n_; ++i) total += static_cast<double>(linear_[i]) * x[i];
  return total;
}

i64 QuadraticPolynomial::evaluate_mod(std::span<const i64> x, i64 q) const {
  std::vector<i64> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = mod(x[i], q);
  const i128 v = evaluate(r);
  return static_cast<i64>(((v % q) + q) % q);
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

i64 parse_int(std::string_view s) {
  const std::string t = trim(s);
  std::string_view v = t;
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  i64 out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw Error(ErrorCode::malformed_input, "expected integer, got '" + t + "'");
  }
  return out;
}

std::vector<i64> parse_int_list(std::string_view s) {
  std::vector<i64> out;
  std::string token;
  auto flush = [&] {
    if (!token.empty()) out.push_back(parse_int(token));
    token.clear();
  };
  for (char ch : s) {
    if (ch == ',' || ch == '[' || ch == ']' || std::isspace(static_cast<unsigned char>(ch))) {
      flush();
    } else {
      token.push_back(ch);
    }
  }
  flush();
  return out;
}

// Monomial (sorted 0-based variable indices) -> coefficient.
using Terms = std::map<std::vector<int>, i64>;

Terms parse_expression(std::string_view expr, int n) {
  Terms terms;
  const std::string text = trim(expr);
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::malformed_input, why + " in '" + text + "'");
  };
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto read_uint = [&]() -> std::optional<i64> {
    const std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) return std::nullopt;
    return parse_int(std::string_view(text).substr(start, pos - start));
  };
  skip_ws();
  if (text.empty()) fail("empty expression");
  bool first = true;
  while (pos < text.size()) {
    skip_ws();
    i64 sign = 1;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      sign = text[pos] == '-' ? -1 : 1;
      ++pos;
    } else if (!first) {
      fail("expected '+' or '-'");
    }
    first = false;
    skip_ws();
    i64 coef = 1;
    std::vector<int> vars;
    bool have_factor = false;
    while (true) {
      skip_ws();
      if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        coef *= *read_uint();
        have_factor = true;
      } else if (pos < text.size() && text[pos] == 'x') {
        ++pos;
        const auto index = read_uint();
        if (!index || *index < 1 || *index > n) fail("bad variable index");
        int power = 1;
        skip_ws();
        if (pos < text.size() && text[pos] == '^') {
          ++pos;
          skip_ws();
          const auto e = read_uint();
          if (!e || *e < 1 || *e > 2) fail("bad exponent");
          power = static_cast<int>(*e);
        }
        for (int i = 0; i < power; ++i) vars.push_back(static_cast<int>(*index) - 1);
        have_factor = true;
      } else {
        break;
      }
      skip_ws();
      if (pos < text.size() && text[pos] == '*') {
        ++pos;
        continue;
      }
      break;
    }
    if (!have_factor) fail("empty term");
    if (vars.size() > 2) fail("degree above 2");
    std::sort(vars.begin(), vars.end());
    terms[vars] += sign * coef;
    skip_ws();
  }
  return terms;
}

}  // namespace

QuadraticPolynomial parse_polynomial(std::string_view text) {
  std::map<std::string, std::string> fields;
  std::string current;
  auto flush = [&] {
    const std::string entry = trim(current);
    current.clear();
    if (entry.empty()) return;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::malformed_input, "missing '=' in '" + entry + "'");
    const std::string key = trim(std::string_view(entry).substr(0, eq));
    if (key != "n" && key != "M" && key != "l" && key != "N" && key != "Q" && key != "L") {
      throw Error(ErrorCode::malformed_input, "unknown key '" + key + "'");
    }
    if (fields.count(key)) throw Error(ErrorCode::malformed_input, "duplicate key '" + key + "'");
    fields[key] = trim(std::string_view(entry).substr(eq + 1));
  };
  bool comment = false;
  for (char ch : text) {
    if (comment) {
      if (ch == '\n') comment = false;
      continue;
    }
    if (ch == '#') {
      comment = true;
      continue;
    }
    if (ch == ';' || ch == '\n') {
      flush();
    } else {
      current.push_back(ch);
    }
  }
  flush();

  if (!fields.count("n")) throw Error(ErrorCode::malformed_input, "missing n");
  const i64 n64 = parse_int(fields["n"]);
  if (n64 < 1 || n64 > 64) throw Error(ErrorCode::malformed_input, "n out of range");
  const int n = static_cast<int>(n64);
  if (fields.count("M") && fields.count("Q")) throw Error(ErrorCode::malformed_input, "both M and Q given");
  if (fields.count("l") && fields.count("L")) throw Error(ErrorCode::malformed_input, "both l and L given");

  std::vector<i64> matrix(static_cast<std::size_t>(n) * n, 0);
  if (fields.count("M")) {
    matrix = parse_int_list(fields["M"]);
    if (matrix.size() != static_cast<std::size_t>(n) * n) {
      throw Error(ErrorCode::malformed_input, "M must list n*n integers");
    }
  } else if (fields.count("Q")) {
    for (const auto& [vars, coef] : parse_expression(fields["Q"], n)) {
      if (coef == 0) continue;
      if (vars.size() != 2) throw Error(ErrorCode::malformed_input, "Q must be a quadratic form");
      const int i = vars[0], j = vars[1];
      if (i == j) {
        matrix[i * n + i] += coef;
      } else {
        if (coef % 2 != 0) {
          throw Error(ErrorCode::odd_cross_coefficient,
                      "coefficient of x" + std::to_string(i + 1) + "*x" + std::to_string(j + 1) + " is odd");
        }
        matrix[i * n + j] += coef / 2;
        matrix[j * n + i] += coef / 2;
      }
    }
  } else {
    throw Error(ErrorCode::malformed_input, "missing M (or Q)");
  }

  std::vector<i64> linear(n, 0);
  if (fields.count("l")) {
    linear = parse_int_list(fields["l"]);
    if (linear.size() != static_cast<std::size_t>(n)) throw Error(ErrorCode::malformed_input, "l must list n integers");
  } else if (fields.count("L")) {
    for (const auto& [vars, coef] : parse_expression(fields["L"], n)) {
      if (coef == 0) continue;
      if (vars.empty()) throw Error(ErrorCode::malformed_input, "L must not have a constant term");
      if (vars.size() != 1) throw Error(ErrorCode::malformed_input, "L must be linear");
      linear[vars[0]] += coef;
    }
  }
  const i64 constant = fields.count("N") ? parse_int(fields["N"]) : 0;
  return QuadraticPolynomial(n, std::move(matrix), std::move(linear), constant);
}

QuadraticPolynomial load_polynomial(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::malformed_input, "cannot open polynomial file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_polynomial(buffer.str());
}

std::string format_polynomial(const QuadraticPolynomial& f) {
  std::ostringstream out;
  out << "n=" << f.n() << "; M=";
  for (std::size_t i = 0; i < f.matrix().size(); ++i) out << (i ? "," : "") << f.matrix()[i];
  out << "; l=";
  for (std::size_t i = 0; i < f.linear().size(); ++i) out << (i ? "," : "") << f.linear()[i];
  out << "; N=" << f.constant();
  return out.str();
}

}  // namespace quadcount
